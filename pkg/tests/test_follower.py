import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmvci.core import UniformMatroid, WeightedGraph
from rmvci.errors import NonConvergenceError
from rmvci.follower import (approx_follower, eval_F, eval_L, pipage_round, pipage_trace,
                            solve_follower_lp)
from rmvci.generators import (random_instance, random_integral_point, random_polytope_point,
                              random_strategy, rng_from)
from rmvci.oracle import solve_follower_ilp_bruteforce
from rmvci.strategy import EffectiveWeights, InterdictionStrategy, strategy_weights

seeds = st.integers(0, 2 ** 32 - 1)


def ew1(wu, wv, wuv):
    return EffectiveWeights(np.array([wu]), np.array([wv]), np.array([wuv]))


def test_eval_L_examples(edge):
    ew = ew1(0.5, 0.5, 0.75)
    assert eval_L(edge, ew, [0.5, 0.5]) == 0.5
    assert eval_L(edge, ew, [1, 1]) == 0.75
    assert eval_L(edge, ew, [0, 0]) == 0


def test_eval_F_examples(edge):
    ew = ew1(0.5, 0.5, 0.75)
    assert eval_F(edge, ew, [0.5, 0.5]) == pytest.approx(0.4375)
    assert eval_F(edge, ew, [0, 0]) == 0
    for x in ([0, 1], [1, 0], [1, 1]):
        assert eval_F(edge, ew, x) == eval_L(edge, ew, x)


def test_follower_lp_examples(edge, k4):
    null = strategy_weights(edge, InterdictionStrategy.null(2))
    x, val = solve_follower_lp(edge, null, UniformMatroid(2, 1))
    assert val == pytest.approx(1)
    assert sorted(x.round(9).tolist()) == [0, 1]
    g, mf = k4
    _, val = solve_follower_lp(g, strategy_weights(g, InterdictionStrategy.null(4)), mf)
    assert val == pytest.approx(6)


@pytest.mark.parametrize("seed", range(5))
def test_follower_lp_dominates_bruteforce_on_six_vertices(seed):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, 6)
    pi = random_strategy(rng, g, ml)
    _, lp = solve_follower_lp(g, strategy_weights(g, pi), mf)
    _, ilp = solve_follower_ilp_bruteforce(g, pi, mf)
    assert ilp <= lp + 1e-6


def test_follower_lp_iteration_cap():
    # two disjoint edges and a single attack: the first LP takes both edges
    g = WeightedGraph(4, ((0, 1, 1.0), (2, 3, 1.0)))
    ew = strategy_weights(g, InterdictionStrategy.null(4))
    with pytest.raises(NonConvergenceError):
        solve_follower_lp(g, ew, UniformMatroid(4, 1), max_iterations=1)
    _, val = solve_follower_lp(g, ew, UniformMatroid(4, 1))
    assert val == pytest.approx(1)


def test_pipage_examples(edge, k4):
    ew = ew1(1.0, 1.0, 1.0)
    tr = pipage_trace(edge, ew, UniformMatroid(2, 1), [0.5, 0.5])
    assert tr.attack_set in (frozenset({0}), frozenset({1}))
    assert tr.F_values[0] == pytest.approx(0.75) and tr.F_values[-1] == pytest.approx(1.0)
    assert pipage_round(edge, ew, UniformMatroid(2, 1), [1.0, 0.0]) == frozenset({0})
    g, mf = k4
    ew = strategy_weights(g, InterdictionStrategy.null(4))
    tr = pipage_trace(g, ew, mf, [0.5] * 4)
    assert len(tr.attack_set) == 2 and tr.F_values[-1] == pytest.approx(5)


def test_approx_follower_examples(edge, k4):
    sol = approx_follower(edge, InterdictionStrategy.null(2), UniformMatroid(2, 1))
    assert sol.ilp_value == 1 and sol.lp_value == pytest.approx(1)
    g, mf = k4
    sol = approx_follower(g, InterdictionStrategy.null(4), mf)
    assert sol.ilp_value == 5 and sol.lp_value == pytest.approx(6)
    assert sol.ratio_bound == pytest.approx(1.2)


def test_fully_interdicted_follower_gets_nothing(edge):
    sol = approx_follower(edge, InterdictionStrategy.pure(2, {0, 1}), UniformMatroid(2, 2))
    assert sol.ilp_value == 0 and sol.lp_value == pytest.approx(0)


@given(seeds, st.integers(2, 12))
def test_F_at_least_three_quarters_L(seed, n):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, n)
    ew = strategy_weights(g, random_strategy(rng, g, ml))
    for _ in range(5):
        x = random_polytope_point(rng, mf)
        assert eval_F(g, ew, x) >= 0.75 * eval_L(g, ew, x) - 1e-9
        xi = random_integral_point(rng, mf)
        assert abs(eval_F(g, ew, xi) - eval_L(g, ew, xi)) <= 1e-12


@given(seeds, st.integers(2, 10))
def test_F_convex_along_exchange_directions(seed, n):
    rng = rng_from(seed)
    g, ml, _ = random_instance(rng, n)
    ew = strategy_weights(g, random_strategy(rng, g, ml))
    x = rng.uniform(0.2, 0.8, size=n)
    i, j = rng.choice(n, size=2, replace=False)
    d = np.zeros(n)
    d[i], d[j] = 1.0, -1.0
    h = 0.1
    vals = [eval_F(g, ew, x + t * d) for t in (-h, 0.0, h)]
    assert vals[0] - 2 * vals[1] + vals[2] >= -1e-12


@given(seeds, st.integers(2, 10))
def test_rounding_trace_is_monotone_and_short(seed, n):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, n)
    ew = strategy_weights(g, random_strategy(rng, g, ml))
    tr = pipage_trace(g, ew, mf, random_polytope_point(rng, mf))
    assert mf.is_independent(tr.attack_set)
    F = tr.F_values
    assert all(b >= a - 1e-9 for a, b in zip(F, F[1:]))
    ranks = [s.tight_rank for s in tr.steps]
    assert all(b > a for a, b in zip(ranks, ranks[1:]))
    assert len(tr.steps) - 1 <= n


@given(seeds, st.integers(2, 10))
def test_lp_ilp_sandwich(seed, n):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, n)
    pi = random_strategy(rng, g, ml)
    sol = approx_follower(g, pi, mf)
    _, exact = solve_follower_ilp_bruteforce(g, pi, mf)
    assert 0.75 * sol.lp_value - 1e-6 <= exact <= sol.lp_value + 1e-6
    assert 0.75 * sol.lp_value - 1e-6 <= sol.ilp_value <= exact + 1e-9
    assert mf.is_independent(sol.attack_set)


def test_isolated_vertices_and_zero_weights():
    g = WeightedGraph(4, ((0, 1, 0.0), (1, 2, 1.0)))
    sol = approx_follower(g, InterdictionStrategy.null(4), UniformMatroid(4, 1))
    assert sol.ilp_value == pytest.approx(1.0)
