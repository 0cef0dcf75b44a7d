"""Walk through the smallest interesting instance: one unit edge.

The leader may protect one endpoint and the follower may attack one.
"""
import numpy as np

from rmvci import UniformMatroid, WeightedGraph, solve_rmvci
from rmvci.follower import approx_follower, eval_F, eval_L
from rmvci.oracle import exact_rmvci_matrix_game
from rmvci.strategy import InterdictionStrategy, strategy_weights

g = WeightedGraph(2, ((0, 1, 1.0),))
one = UniformMatroid(2, 1)

# with no interdiction the follower takes a whole edge
print("unprotected:", approx_follower(g, InterdictionStrategy.null(2), one).ilp_value)

# protecting each endpoint half the time halves the damage
pi = InterdictionStrategy.from_pairs([(0.5, {0}), (0.5, {1})], 2)
ew = strategy_weights(g, pi)
x = np.array([0.5, 0.5])
print("L at the midpoint:", eval_L(g, ew, x))
print("F at the midpoint:", eval_F(g, ew, x))
print("follower against the coin flip:", approx_follower(g, pi, one).ilp_value)

cert = solve_rmvci(g, one, one)
print()
print("leader strategy:", [(p, sorted(s)) for p, s in cert.pi_prime.support])
print("achieved value :", cert.theta_achieved)
print("lower bound    :", cert.lower_bound)
print("certified ratio:", round(cert.guaranteed_ratio, 4))

_, best = exact_rmvci_matrix_game(g, one, one)
print("matrix-game optimum:", best)
