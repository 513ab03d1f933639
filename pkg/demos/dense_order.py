"""The generic linear order: dense, without endpoints.

Points are natural numbers but their order is whatever the forcing makes
it, so reading the first few off in increasing order shows a shuffled list.
"""

from fraisse_forcing import BuildConfig, GroundSet, run
from fraisse_forcing.verify import check_density_linear, check_partial_iso_extension

M = run(BuildConfig("linear-order", 500, ground_sets=(GroundSet(0, 2),)))
lt = M.final.relation("<")

first = [x for x in M.final.sorted_universe() if x < 15]
ranked = sorted(first, key=lambda x: sum((y, x) in lt for y in first))
print("points 0..14 in order:", " < ".join(map(str, ranked)))

report = check_density_linear(M, 20)
print(report.line())
print(check_partial_iso_extension(M, 2, 8).line())
