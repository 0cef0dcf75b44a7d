import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmvci.core import PartitionMatroid, UniformMatroid, WeightedGraph
from rmvci.errors import InputError
from rmvci.follower import eval_L
from rmvci.generators import (random_graph, random_instance, random_matroid, random_polytope_point,
                              random_strategy, rng_from)
from rmvci.leader import (caratheodory_decompose, eval_Ltilde, solve_leader_relaxed,
                          solve_leader_uniform_dual, solve_rmvci, surrogate_best_response)
from rmvci.oracle import exact_rmvci_matrix_game, solve_follower_ilp_bruteforce
from rmvci.strategy import InterdictionStrategy, marginals_of, strategy_weights

seeds = st.integers(0, 2 ** 32 - 1)


def support_marginals(pi, n):
    q = np.zeros(n)
    for p, s in pi.support:
        q[list(s)] += p
    return q


def test_eval_Ltilde_examples(edge, triangle):
    assert eval_Ltilde(edge, [0.5, 0.5], {0, 1}) == 1.0
    assert eval_Ltilde(edge, [1, 1], {0, 1}) == 0
    assert eval_Ltilde(triangle, [0, 0, 0], {0}) == 2
    assert eval_Ltilde(triangle, [0, 0, 0], np.array([0.5, 0.5, 0.0])) == 2


def test_leader_relaxed_examples(edge):
    u1 = UniformMatroid(2, 1)
    qs, val = solve_leader_relaxed(edge, u1, u1)
    assert val == pytest.approx(0.5) and qs.q.tolist() == pytest.approx([0.5, 0.5])
    g = random_graph(rng_from(3), 6)
    qs, val = solve_leader_relaxed(g, UniformMatroid(6, 0), UniformMatroid(6, 2))
    assert qs.q.tolist() == [0] * 6
    assert val == pytest.approx(surrogate_best_response(g, np.zeros(6), UniformMatroid(6, 2))[1])
    _, val = solve_leader_relaxed(g, UniformMatroid(6, 2), UniformMatroid(6, 0))
    assert val == pytest.approx(0)


def test_uniform_dual_examples(edge):
    qs, val = solve_leader_uniform_dual(edge, 1, 1)
    assert val == pytest.approx(0.5)
    g = random_graph(rng_from(4), 7)
    qs, val = solve_leader_uniform_dual(g, 7, 3)
    assert val == pytest.approx(0, abs=1e-9) and qs.q.tolist() == pytest.approx([1] * 7)
    qs, val = solve_leader_uniform_dual(g, 0, 3)
    assert qs.q.tolist() == [0] * 7
    assert val == pytest.approx(np.sort(g.weighted_degree)[-3:].sum())


def test_uniform_dual_rejects_bad_ranks(edge):
    with pytest.raises(InputError):
        solve_leader_uniform_dual(edge, 3, 1)


def test_decomposition_examples():
    pi = caratheodory_decompose(UniformMatroid(2, 1), np.array([0.5, 0.5]))
    assert pi.support == ((0.5, frozenset({0})), (0.5, frozenset({1})))
    part = PartitionMatroid(4, ((0, 1), (2, 3)), (1, 1))
    pi = caratheodory_decompose(part, np.array([1.0, 0.0, 0.0, 1.0]))
    assert pi.support == ((1.0, frozenset({0, 3})),)
    q = np.array([0.8, 0.7, 0.5])
    pi = caratheodory_decompose(UniformMatroid(3, 2), q)
    assert len(pi) <= 4
    assert support_marginals(pi, 3) == pytest.approx(q, abs=1e-12)


def test_decomposition_rejects_points_outside_polytope():
    with pytest.raises(InputError):
        caratheodory_decompose(UniformMatroid(2, 1), np.array([0.6, 0.6]))
    with pytest.raises(InputError):
        caratheodory_decompose(UniformMatroid(2, 1), np.array([0.5]))


def test_solve_examples(edge):
    u1 = UniformMatroid(2, 1)
    cert = solve_rmvci(edge, u1, u1)
    assert cert.theta_achieved == pytest.approx(0.5)
    assert cert.lower_bound == pytest.approx(0.1875)
    assert cert.guaranteed_ratio == pytest.approx(8 / 3)
    assert exact_rmvci_matrix_game(edge, u1, u1)[1] == pytest.approx(0.5)


def test_powerless_leader_plays_nothing():
    rng = rng_from(9)
    g = random_graph(rng, 6)
    mf = random_matroid(rng, 6, "partition")
    cert = solve_rmvci(g, UniformMatroid(6, 0), mf)
    assert cert.pi_prime.support == ((1.0, frozenset()),)
    _, best = solve_follower_ilp_bruteforce(g, InterdictionStrategy.null(6), mf)
    assert cert.theta_achieved == pytest.approx(best)


def test_method_selection_and_errors(edge):
    u1 = UniformMatroid(2, 1)
    assert solve_rmvci(edge, u1, u1).method == "uniform-dual"
    assert solve_rmvci(edge, u1, u1, method="cutting-plane").method == "cutting-plane"
    part = PartitionMatroid(2, ((0,), (1,)), (1, 0))
    with pytest.raises(InputError):
        solve_rmvci(edge, part, u1, method="uniform-dual")
    with pytest.raises(InputError):
        solve_rmvci(edge, u1, u1, method="simplex")
    with pytest.raises(InputError):
        solve_rmvci(edge, UniformMatroid(3, 1), u1)


def test_certificate_without_exact_evaluation():
    rng = rng_from(12)
    g, ml, mf = random_instance(rng, 8)
    cert = solve_rmvci(g, ml, mf, exact_limit=0)
    assert not cert.theta_exact
    assert cert.theta_achieved <= cert.theta_upper + 1e-9
    assert cert.guaranteed_ratio <= 8 / 3 + 1e-6


def test_Ltilde_sees_only_vertex_marginals():
    g = WeightedGraph.complete(4)
    a = InterdictionStrategy.from_pairs([(0.5, {0, 1}), (0.5, {2, 3})], 4)
    b = InterdictionStrategy.from_pairs([(0.5, {0, 2}), (0.5, {1, 3})], 4)
    qa, qb = marginals_of(g, a), marginals_of(g, b)
    assert qa.q.tolist() == qb.q.tolist()
    assert qa.q_pair.tolist() != qb.q_pair.tolist()
    x = np.array([1.0, 1.0, 0.0, 0.0])
    assert eval_Ltilde(g, qa.q, x) == eval_Ltilde(g, qb.q, x)
    assert eval_L(g, strategy_weights(g, a), x) != eval_L(g, strategy_weights(g, b), x)


@given(seeds, st.integers(2, 12))
def test_Ltilde_sandwich(seed, n):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, n)
    pi = random_strategy(rng, g, ml, max_support=6)
    ew, q = strategy_weights(g, pi), marginals_of(g, pi).q
    for _ in range(5):
        x = random_polytope_point(rng, mf)
        L, Lt = eval_L(g, ew, x), eval_Ltilde(g, q, x)
        assert 0.5 * Lt - 1e-9 <= L <= Lt + 1e-9


@given(seeds, st.integers(1, 12))
def test_dual_paths_agree(seed, n):
    rng = rng_from(seed)
    g = random_graph(rng, n)
    kl, kf = (int(k) for k in rng.integers(0, n + 1, size=2))
    _, a = solve_leader_uniform_dual(g, kl, kf)
    _, b = solve_leader_relaxed(g, UniformMatroid(n, kl), UniformMatroid(n, kf))
    assert abs(a - b) <= 1e-6


@given(seeds, st.integers(1, 16), st.sampled_from(["uniform", "partition", "graphic", "explicit"]))
def test_decomposition_round_trip(seed, n, kind):
    rng = rng_from(seed)
    m = random_matroid(rng, n, kind)
    q = random_polytope_point(rng, m)
    pi = caratheodory_decompose(m, q)
    assert np.max(np.abs(support_marginals(pi, n) - q)) <= 1e-7
    assert len(pi) <= n + 1
    assert pi.is_feasible_for(m)
    assert abs(pi.probabilities.sum() - 1) <= 1e-9


@given(seeds, st.integers(2, 7))
def test_certificate_soundness_against_exact_optimum(seed, n):
    rng = rng_from(seed)
    g, ml, mf = random_instance(rng, n)
    cert = solve_rmvci(g, ml, mf)
    _, theta_star = exact_rmvci_matrix_game(g, ml, mf)
    assert cert.lower_bound <= theta_star + 1e-6
    assert cert.theta_achieved <= 8 / 3 * theta_star + 1e-6
    assert cert.guaranteed_ratio <= 8 / 3 + 1e-6
    assert len(cert.pi_prime) <= n + 1
