from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmvci.core import GraphicMatroid, UniformMatroid, WeightedGraph, coverage_weight
from rmvci.errors import CapacityError, InputError
from rmvci.follower import solve_follower_lp
from rmvci.generators import random_graph, random_instance, random_matroid, random_strategy, rng_from
from rmvci.leader import solve_rmvci
from rmvci.oracle import (_independent_masks, count_independent_sets, enumerate_independent_sets,
                          exact_rmvci_matrix_game, game_matrix, gap_formula, gap_instance,
                          solve_follower_ilp_bruteforce)
from rmvci.strategy import InterdictionStrategy, expected_payoff, strategy_weights

seeds = st.integers(0, 2 ** 32 - 1)


def test_enumeration_examples(triangle_matroid):
    assert enumerate_independent_sets(UniformMatroid(2, 1)) == [frozenset(), frozenset({0}), frozenset({1})]
    assert enumerate_independent_sets(UniformMatroid(3, 0)) == [frozenset()]
    sets = enumerate_independent_sets(triangle_matroid)
    assert len(sets) == 7 and frozenset({0, 1, 2}) not in sets


def test_enumeration_capacity_guard():
    with pytest.raises(CapacityError):
        enumerate_independent_sets(UniformMatroid(25, 1))


@given(seeds, st.integers(1, 10), st.sampled_from(["uniform", "partition", "graphic", "explicit"]))
def test_enumeration_is_exactly_the_independent_family(seed, n, kind):
    m = random_matroid(rng_from(seed), n, kind)
    got = {sum(1 << v for v in s) for s in enumerate_independent_sets(m)}
    assert got == {mk for mk in range(1 << n) if m.is_independent(mk)}
    assert count_independent_sets(m, 1 << n) == len(got)
    if len(got) > 1:
        assert count_independent_sets(m, len(got) - 1) is None


def test_uniform_count_uses_binomials():
    assert count_independent_sets(UniformMatroid(20, 3), 10 ** 6) == sum(comb(20, j) for j in range(4))
    assert count_independent_sets(UniformMatroid(30, 2), 10 ** 6) is None


def test_bruteforce_examples(edge, k4):
    assert solve_follower_ilp_bruteforce(edge, InterdictionStrategy.null(2), UniformMatroid(2, 1))[1] == 1
    pi = InterdictionStrategy.pure(2, {0, 1})
    best, val = solve_follower_ilp_bruteforce(edge, pi, UniformMatroid(2, 2))
    assert val == 0 and best == frozenset()
    g, mf = k4
    assert solve_follower_ilp_bruteforce(g, InterdictionStrategy.null(4), mf)[1] == 5


def test_bruteforce_tie_break_smallest_then_lexicographic(triangle):
    best, _ = solve_follower_ilp_bruteforce(triangle, InterdictionStrategy.null(3), UniformMatroid(3, 3))
    assert best == frozenset({0, 1})


def test_game_matrix_invariants():
    g = random_graph(rng_from(2), 5)
    rows = _independent_masks(UniformMatroid(5, 2))
    cols = _independent_masks(UniformMatroid(5, 3))
    gm = game_matrix(g, rows, cols)
    assert np.all(gm.payoff >= 0)
    assert gm.payoff[0].tolist() == pytest.approx([coverage_weight(g, c) for c in cols])


def test_matrix_game_examples(edge):
    u1 = UniformMatroid(2, 1)
    pi, theta = exact_rmvci_matrix_game(edge, u1, u1)
    assert theta == pytest.approx(0.5)
    assert [s for _, s in pi.support] == [frozenset({0}), frozenset({1})]
    assert pi.probabilities.tolist() == pytest.approx([0.5, 0.5])
    g = random_graph(rng_from(5), 6)
    _, theta = exact_rmvci_matrix_game(g, UniformMatroid(6, 6), UniformMatroid(6, 3))
    assert theta == pytest.approx(0)
    _, theta = exact_rmvci_matrix_game(g, UniformMatroid(6, 0), UniformMatroid(6, 3))
    assert theta == pytest.approx(solve_follower_ilp_bruteforce(g, InterdictionStrategy.null(6),
                                                                UniformMatroid(6, 3))[1])


def test_matrix_game_frozen_values():
    # exact values from the rational reference on the full game
    tri = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)))
    pi, theta = exact_rmvci_matrix_game(tri, UniformMatroid(3, 1), UniformMatroid(3, 1))
    assert theta == pytest.approx(float(Fraction(120, 47)), abs=1e-9)
    q = np.zeros(3)
    for p, s in pi.support:
        q[list(s)] += p
    assert q == pytest.approx([17 / 47, 7 / 47, 23 / 47], abs=1e-9)
    _, theta = exact_rmvci_matrix_game(WeightedGraph.complete(4), UniformMatroid(4, 1), UniformMatroid(4, 2))
    assert theta == pytest.approx(4.0, abs=1e-9)


@given(seeds, st.integers(2, 7))
def test_matrix_game_optimality(seed, n):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, n)
    _, theta = exact_rmvci_matrix_game(g, ml, mf)
    for _ in range(3):
        pi = random_strategy(rng, g, ml)
        assert theta <= solve_follower_ilp_bruteforce(g, pi, mf)[1] + 1e-9
    assert solve_rmvci(g, ml, mf).lower_bound <= theta + 1e-6


@given(seeds, st.integers(2, 9))
def test_relaxation_dominates_bruteforce(seed, n):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, n)
    pi = random_strategy(rng, g, ml)
    _, lp = solve_follower_lp(g, strategy_weights(g, pi), mf)
    best, val = solve_follower_ilp_bruteforce(g, pi, mf)
    assert val <= lp + 1e-6
    assert val == expected_payoff(g, pi, best)


def test_gap_instance_examples():
    g, mf = gap_instance(4)
    assert g.edge_count == 6 and mf == UniformMatroid(4, 2)
    assert gap_formula(4) == (6, 5, Fraction(6, 5))
    assert gap_formula(20)[2] == Fraction(190, 145)
    assert gap_formula(40)[2] == Fraction(780, 590)
    for bad in (3, 0, -2):
        with pytest.raises(InputError):
            gap_instance(bad)


def test_gap_ratios_increase_toward_four_thirds():
    ratios = [gap_formula(n)[2] for n in range(2, 201, 2)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert all(r < Fraction(4, 3) for r in ratios)


def test_matrix_game_capacity_guard():
    g = WeightedGraph.complete(24)
    with pytest.raises(CapacityError):
        exact_rmvci_matrix_game(g, UniformMatroid(24, 3), UniformMatroid(24, 3))


def test_graphic_enumeration_count(triangle_matroid):
    path = GraphicMatroid(((0, 1), (1, 2), (2, 3)))
    assert len(enumerate_independent_sets(path)) == 8
