"""How far can the follower's LP overestimate the true best attack?

On a complete graph with unit weights and half the vertices attackable,
the LP covers every edge while any real attack misses the edges between
untouched vertices.  The ratio creeps up toward 4/3.
"""
from math import comb

from rmvci.follower import approx_follower
from rmvci.oracle import gap_formula, gap_instance
from rmvci.strategy import InterdictionStrategy

print(f"{'n':>4} {'lp':>6} {'rounded':>8} {'ratio':>8}")
for n in range(4, 33, 4):
    g, mf = gap_instance(n)
    sol = approx_follower(g, InterdictionStrategy.null(n), mf)
    lp, ilp, exact_ratio = gap_formula(n)
    assert sol.lp_value == lp and sol.ilp_value == ilp
    print(f"{n:>4} {sol.lp_value:>6.0f} {sol.ilp_value:>8.0f} {sol.lp_value / sol.ilp_value:>8.4f}")

n = 10 ** 6
k = n // 2
print("closed form at n = 10**6:", comb(n, 2) / (k * (n - 1) - comb(k, 2)))
