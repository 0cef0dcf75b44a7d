"""Randomized max-vertex-cover interdiction under matroid constraints.

A leader commits to a distribution over independent sets of vertices to
protect; a follower then attacks an independent set of vertices and
collects the weight of edges touching attacked, unprotected vertices. The
package computes approximate best responses for both sides, certified
bounds, and exact baselines for small instances.
"""
from .core import (ExplicitMatroid, GraphicMatroid, Matroid, PartitionMatroid, UniformMatroid,
                   WeightedGraph, coverage_weight, greedy_max_weight, is_independent, rank)
from .errors import (CapacityError, DecompositionError, InputError, InvalidMarginalsError,
                     NonConvergenceError, RmvciError, StructuralError)
from .follower import (FollowerSolution, approx_follower, eval_F, eval_L, pipage_round, pipage_trace,
                       solve_follower_lp)
from .leader import (MarginalStrategy, SolveCertificate, caratheodory_decompose, eval_Ltilde,
                     solve_leader_relaxed, solve_leader_uniform_dual, solve_rmvci)
from .lp import Cut, LinearProgram, LpSolution, cutting_plane_maximize, separate_matroid_polytope, solve_lp
from .oracle import (GameMatrix, enumerate_independent_sets, exact_rmvci_matrix_game, gap_instance,
                     rational_simplex_reference, solve_follower_ilp_bruteforce)
from .strategy import (EffectiveWeights, InterdictionStrategy, PairwiseMarginals, effective_weights,
                       expected_payoff, marginals_of)

__version__ = "0.1.0"
