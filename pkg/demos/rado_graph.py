"""Grow a prefix of the random graph and look at its extension property.

Every finite graph embeds in the limit, and over any finite set of vertices
every prescribed adjacency pattern is realized by some further vertex.  A
2000-step build is enough to see both on the first ten vertices.
"""

from fraisse_forcing import BuildConfig, GroundSet, run
from fraisse_forcing.verify import check_embeddability, check_extension_property

M = run(BuildConfig("graph", 2000, seed=0, ground_sets=(GroundSet(0, 2),)))
print("summary:", M.summary())

# degrees of the first few vertices
for v in range(8):
    print(f"vertex {v}: degree {M.final.degree(v)}")

print(check_embeddability(M, 3).line())
report = check_extension_property(M, 3, 10)
print(report.line())
for w in report.warnings:
    print("  ", w)

# witnesses for ground obligations were drawn from the even numbers
ground = [e.witness for e in M.ledger if e.obligation.kind == "ground"]
print(f"{len(ground)} ground witnesses, all even: {all(w % 2 == 0 for w in ground)}")
