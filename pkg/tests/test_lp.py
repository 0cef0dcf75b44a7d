from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmvci.core import GraphicMatroid, PartitionMatroid, UniformMatroid
from rmvci.errors import CapacityError, InputError, NonConvergenceError
from rmvci.generators import random_lp, random_matroid, random_polytope_point, rng_from
from rmvci.lp import Cut, LinearProgram, cutting_plane_maximize, separate_matroid_polytope, solve_lp
from rmvci.oracle import rational_simplex_reference

seeds = st.integers(0, 2 ** 32 - 1)


def test_solve_lp_examples():
    s = solve_lp(LinearProgram.build([1], [([1], "<=", 3)], sense="max"))
    assert s.status == "optimal" and s.x[0] == pytest.approx(3) and s.objective == pytest.approx(3)
    s = solve_lp(LinearProgram.build([0], [([1], ">=", 1), ([1], "<=", 0)], bounds=[(None, None)],
                                     sense="min"))
    assert s.status == "infeasible"
    s = solve_lp(LinearProgram.build([1, 1], [([1, 1], "<=", 1)], sense="max"))
    assert s.objective == pytest.approx(1)


def test_unbounded_and_free_variables():
    assert solve_lp(LinearProgram.build([1], [], sense="max")).status == "unbounded"
    s = solve_lp(LinearProgram.build([1], [([1], ">=", -4)], bounds=[(None, None)], sense="min"))
    assert s.x[0] == pytest.approx(-4)


def test_equality_rows_and_negative_rhs():
    s = solve_lp(LinearProgram.build([1, 2], [([1, 1], "=", 3), ([-1, 0], "<=", -1)],
                                     bounds=[(0, None), (0, 1.5)], sense="max"))
    assert s.objective == pytest.approx(4.5)
    assert s.x.tolist() == pytest.approx([1.5, 1.5])


def test_lp_validation():
    with pytest.raises(InputError):
        LinearProgram.build([1], [([1, 2], "<=", 1)])
    with pytest.raises(InputError):
        LinearProgram.build([1], [([1], "<>", 1)])
    with pytest.raises(InputError):
        LinearProgram.build([np.inf], [])


def test_separation_examples():
    cut = separate_matroid_polytope(UniformMatroid(2, 1), np.array([0.6, 0.6]))
    assert cut.a.tolist() == [1, 1] and cut.b == 1
    assert separate_matroid_polytope(UniformMatroid(3, 2), np.array([0.5, 0.5, 0.5])) is None
    tri = GraphicMatroid(((0, 1), (1, 2), (0, 2)))
    cut = separate_matroid_polytope(tri, np.array([0.7, 0.7, 0.7]))
    assert cut.a.tolist() == [1, 1, 1] and cut.b == 2


def test_separation_negative_entry_gives_bound_cut():
    cut = separate_matroid_polytope(UniformMatroid(3, 2), np.array([0.2, -0.1, 0.3]))
    assert cut.a.tolist() == [0, -1, 0] and cut.b == 0


def test_separation_capacity_guard():
    m = GraphicMatroid(tuple((i, i + 1) for i in range(30)))
    with pytest.raises(CapacityError):
        separate_matroid_polytope(m, np.full(30, 0.01))


def _exhaustive_violation(m, x):
    n = m.ground_size
    best, arg = 0.0, 0
    for S in range(1, 1 << n):
        v = sum(x[i] for i in range(n) if (S >> i) & 1) - m.rank(S)
        if v > best:
            best, arg = v, S
    return best, arg


@given(seeds, st.integers(1, 10), st.sampled_from(["uniform", "partition", "graphic", "explicit"]))
def test_separation_matches_exhaustive_search(seed, n, kind):
    rng = rng_from(seed)
    m = random_matroid(rng, n, kind)
    x = np.clip(random_polytope_point(rng, m) * rng.uniform(0.8, 1.6), 0, 1)
    best, _ = _exhaustive_violation(m, x)
    cut = separate_matroid_polytope(m, x)
    if best > 1e-9:
        assert cut is not None
        assert cut.violation(x) == pytest.approx(best, abs=1e-12)
    else:
        assert cut is None or cut.violation(x) <= 1e-9


def test_rational_reference_examples():
    p = LinearProgram.build([1], [([1], "<=", Fraction(1, 3))], sense="max")
    assert rational_simplex_reference(p).objective == Fraction(1, 3)
    # compact leader LP on a single unit edge with one interdiction and one attack
    c = [0, 0, 1, 1, 1]
    rows = [([1, 0, 1, 1, 0], ">=", 1), ([0, 1, 1, 0, 1], ">=", 1), ([1, 1, 0, 0, 0], "<=", 1)]
    bounds = [(0, 1), (0, 1), (0, None), (0, None), (0, None)]
    sol = rational_simplex_reference(LinearProgram.build(c, rows, bounds, "min"))
    assert sol.objective == Fraction(1, 2)


def test_rational_reference_capacity():
    with pytest.raises(CapacityError):
        rational_simplex_reference(LinearProgram.build(np.ones(13), []))


@given(seeds)
def test_float_simplex_matches_rational_reference(seed):
    p = random_lp(rng_from(seed))
    ref = rational_simplex_reference(p)
    got = solve_lp(p)
    assert got.status == ref.status
    if ref.status == "optimal":
        assert got.objective == pytest.approx(float(ref.objective), abs=1e-6)
        assert p.violation(got.x) <= 1e-7


def test_cutting_plane_on_uniform_polytope():
    base = LinearProgram.build([3, 2, 1], [], bounds=[(0, 1)] * 3, sense="max")
    m = UniformMatroid(3, 2)
    sol = cutting_plane_maximize(base, lambda x: separate_matroid_polytope(m, x))
    assert sol.objective == pytest.approx(5)
    assert sol.rounds >= 1 and len(sol.cuts) >= 1


def test_cutting_plane_partition_polytope():
    base = LinearProgram.build([1, 1, 1, 1], [], bounds=[(0, 1)] * 4, sense="max")
    m = PartitionMatroid(4, ((0, 1, 2), (3,)), (1, 0))
    sol = cutting_plane_maximize(base, lambda x: separate_matroid_polytope(m, x))
    assert sol.objective == pytest.approx(1)


def test_cutting_plane_iteration_cap():
    base = LinearProgram.build([1], [], bounds=[(0, 10)], sense="max")
    calls = iter(range(100))

    def never_done(x):
        k = next(calls)
        return Cut(np.array([1.0]), 10 - 0.01 * (k + 1))

    with pytest.raises(NonConvergenceError) as info:
        cutting_plane_maximize(base, never_done, max_iterations=5)
    assert info.value.last_iterate is not None
