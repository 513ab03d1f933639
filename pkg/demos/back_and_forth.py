"""Two random-graph prefixes look alike to a bounded back-and-forth game.

Builds with different seeds give different labelled graphs, yet the
duplicator survives four rounds.  Against a triangle-free prefix the
spoiler wins by asking for a triangle.
"""

import time

from fraisse_forcing import BuildConfig, run
from fraisse_forcing.verify import back_and_forth_equiv

g1 = run(BuildConfig("graph", 2000, seed=1))
g2 = run(BuildConfig("graph", 2000, seed=2))
tf = run(BuildConfig("triangle-free", 2000))
print("same labelled graph:", g1.final == g2.final)

t = time.time()
print(back_and_forth_equiv(g1, g2, 4, 12).line(), f"({time.time() - t:.1f}s)")

r = back_and_forth_equiv(g1, tf, 3, 12)
print(r.line())
for move in r.witness["line"]:
    print("   side", move["side"], "plays", move["challenge"], "answer", move["response"])
