"""Brute-force ground truth for small instances.

Nothing here is used on the main solving path except the exact best
response, which the pipeline calls when the follower's matroid is small
enough to enumerate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy.optimize import linprog

from .core import Matroid, UniformMatroid, WeightedGraph, coverage_of_masks, mask_to_set, popcount
from .errors import CapacityError, InputError
from .lp import LinearProgram, LpSolution
from .strategy import InterdictionStrategy, expected_payoff

MAX_ENUM_GROUND = 24
MAX_GAME_ENTRIES = 2 ** 22


def _independent_masks(m: Matroid, limit: int | None = None) -> list[int] | None:
    """All independent sets as bitmasks via a downward-closed DFS.

    Sets are grown only by elements above their current maximum, so each is
    visited once. Returns ``None`` once more than ``limit`` sets turn up.
    """
    n = m.ground_size
    if n > MAX_ENUM_GROUND:
        raise CapacityError(f"ground set of size {n} exceeds enumeration limit {MAX_ENUM_GROUND}")
    out = [0]
    stack = [(0, 0)]
    while stack:
        mask, start = stack.pop()
        for i in range(start, n):
            nxt = mask | (1 << i)
            if m._independent(nxt):
                out.append(nxt)
                if limit is not None and len(out) > limit:
                    return None
                stack.append((nxt, i + 1))
    out.sort(key=lambda mk: (popcount(mk), sorted(mask_to_set(mk))))
    return out


def enumerate_independent_sets(m: Matroid) -> list[frozenset]:
    return [mask_to_set(mk) for mk in _independent_masks(m)]


def count_independent_sets(m: Matroid, limit: int) -> int | None:
    """Number of independent sets, or ``None`` if it exceeds ``limit``."""
    if m.ground_size > MAX_ENUM_GROUND:
        return None
    if isinstance(m, UniformMatroid):
        total = sum(comb(m.ground_size, j) for j in range(m.k + 1))
        return total if total <= limit else None
    masks = _independent_masks(m, limit)
    return None if masks is None else len(masks)


def _maximal(masks: list[int], n: int) -> list[int]:
    present = set(masks)
    return [mk for mk in masks if not any(((mk >> i) & 1) == 0 and (mk | (1 << i)) in present
                                          for i in range(n))]


@dataclass(frozen=True)
class GameMatrix:
    """Payoff ``coverage_weight(g, X minus S)`` for leader rows ``S`` and follower columns ``X``."""

    rows: np.ndarray
    cols: np.ndarray
    payoff: np.ndarray


def game_matrix(g: WeightedGraph, leader_masks, follower_masks) -> GameMatrix:
    rows = np.asarray(leader_masks, dtype=np.int64)
    cols = np.asarray(follower_masks, dtype=np.int64)
    if rows.size * cols.size > MAX_GAME_ENTRIES:
        raise CapacityError(f"game matrix {rows.size} x {cols.size} exceeds {MAX_GAME_ENTRIES} entries")
    survivors = cols[None, :] & ~rows[:, None]
    return GameMatrix(rows, cols, coverage_of_masks(g, survivors))


def best_response_values(g: WeightedGraph, pi: InterdictionStrategy, follower_masks) -> np.ndarray:
    """Expected payoff of every follower set against ``pi`` (direct definition)."""
    cols = np.asarray(follower_masks, dtype=np.int64)
    total = np.zeros(cols.shape)
    for p, s in pi.support:
        smask = sum(1 << v for v in s)
        total += p * coverage_of_masks(g, cols & ~smask)
    return total


def solve_follower_ilp_bruteforce(g: WeightedGraph, pi: InterdictionStrategy,
                                  mf: Matroid) -> tuple[frozenset, float]:
    """Exact best response by enumeration; ties go to the smallest, then lexicographically first set."""
    masks = _independent_masks(mf)
    values = best_response_values(g, pi, masks)
    best = values.max()
    for mk, val in zip(masks, values):
        # masks are sorted by (size, sorted ids)
        if val >= best - 1e-12 * max(1.0, abs(best)):
            chosen = mask_to_set(mk)
            return chosen, expected_payoff(g, pi, chosen)
    raise AssertionError("unreachable")


def theta_exact(g: WeightedGraph, pi: InterdictionStrategy, mf: Matroid) -> float:
    return solve_follower_ilp_bruteforce(g, pi, mf)[1]


def exact_rmvci_matrix_game(g: WeightedGraph, ml: Matroid, mf: Matroid) -> tuple[InterdictionStrategy, float]:
    """Optimal randomized interdiction by solving the finite zero-sum game as an LP.

    Payoffs are monotone (more interdiction never helps the follower, a
    larger attack never hurts it), so only maximal sets on each side are
    kept as pure strategies.
    """
    n = g.vertex_count
    lead = _independent_masks(ml)
    foll = _independent_masks(mf)
    if len(lead) * len(foll) > MAX_GAME_ENTRIES:
        raise CapacityError(f"game with {len(lead)} x {len(foll)} entries exceeds {MAX_GAME_ENTRIES}")
    rows, cols = _maximal(lead, n), _maximal(foll, n)
    game = game_matrix(g, rows, cols)
    R, C = game.payoff.shape
    # variables: pi (R) then v; minimize v s.t. payoff^T pi <= v
    c = np.zeros(R + 1)
    c[-1] = 1.0
    A_ub = np.hstack([game.payoff.T, -np.ones((C, 1))])
    A_eq = np.concatenate([np.ones(R), [0.0]])[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(C), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * R + [(None, None)], method="highs")
    if res.status != 0:
        raise RuntimeError(f"matrix-game LP failed: {res.message}")
    probs = np.clip(res.x[:R], 0.0, None)
    keep = probs > 1e-12
    pi = InterdictionStrategy.from_pairs(
        [(p, mask_to_set(int(mk))) for p, mk in zip(probs[keep], game.rows[keep])], n, leader=ml)
    value = float(best_response_values(g, pi, foll).max())
    return pi, value


# ---------------------------------------------------------------------------
# the tight integrality-gap family

def gap_instance(n: int) -> tuple[WeightedGraph, UniformMatroid]:
    """Complete graph ``K_n`` with unit weights and a uniform follower matroid of rank ``n/2``."""
    if n < 2 or n % 2:
        raise InputError(f"gap instances need an even n >= 2, got {n}")
    return WeightedGraph.complete(n), UniformMatroid(n, n // 2)


def gap_formula(n: int) -> tuple[int, int, Fraction]:
    """``(lp, ilp, ratio)``: the half-integral point covers every edge, any ``n/2``-set misses ``C(n/2, 2)``."""
    k = n // 2
    lp = comb(n, 2)
    ilp = k * (n - 1) - comb(k, 2)
    return lp, ilp, Fraction(lp, ilp)


# ---------------------------------------------------------------------------
# exact rational simplex

MAX_RATIONAL_VARS = 12
MAX_RATIONAL_ROWS = 64


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def rational_simplex_reference(p: LinearProgram) -> LpSolution:
    """Textbook two-phase simplex in exact rational arithmetic with Bland's rule.

    Meant for cross-checking the floating-point solver on tiny programs; the
    returned ``x`` and ``objective`` hold :class:`fractions.Fraction` values.
    """
    n = p.num_vars
    if n > MAX_RATIONAL_VARS or p.b.size > MAX_RATIONAL_ROWS:
        raise CapacityError("rational reference handles at most 12 variables and 64 constraints")
    if p.exact is not None:
        c_ex, A_ex, b_ex, lo_ex, hi_ex = p.exact
    else:
        c_ex = [_frac(v) for v in p.c]
        A_ex = [[_frac(v) for v in row] for row in p.A]
        b_ex = [_frac(v) for v in p.b]
        lo_ex = [_frac(v) if np.isfinite(v) else None for v in p.lo]
        hi_ex = [_frac(v) if np.isfinite(v) else None for v in p.hi]
    # substitute x_j = lo + y, x_j = hi - y, or y+ - y- when free
    cols = []  # (original variable, sign)
    offset = [Fraction(0)] * n
    rows = [(list(A_ex[i]), p.rel[i], b_ex[i]) for i in range(p.b.size)]
    upper = []
    for j in range(n):
        lo, hi = lo_ex[j], hi_ex[j]
        if lo is not None:
            offset[j] = lo
            cols.append((j, 1))
            if hi is not None:
                upper.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            offset[j] = hi
            cols.append((j, -1))
        else:
            cols.append((j, 1))
            cols.append((j, -1))
    N = len(cols)
    std = []
    for a, rel, b in rows:
        coeff = [a[j] * sgn for j, sgn in cols]
        rhs = b - sum(a[j] * offset[j] for j in range(n))
        std.append((coeff, rel, rhs))
    for col, val in upper:
        coeff = [Fraction(0)] * N
        coeff[col] = Fraction(1)
        std.append((coeff, "<=", val))
    sign = 1 if p.sense == "max" else -1
    cost = [sign * c_ex[j] * sgn for j, sgn in cols]

    # orient rows so rhs >= 0
    oriented = []
    for coeff, rel, rhs in std:
        if rhs < 0:
            coeff = [-a for a in coeff]
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<="}.get(rel, rel)
        oriented.append((coeff, rel, rhs))
    n_slack = sum(r != "=" for _, r, _ in oriented)
    art_start = N + n_slack
    width = art_start + sum(r != "<=" for _, r, _ in oriented)
    T = []
    basis = []
    s, a = N, art_start
    for coeff, rel, rhs in oriented:
        row = coeff + [Fraction(0)] * (width - N) + [rhs]
        if rel == "<=":
            row[s] = Fraction(1)
            basis.append(s)
            s += 1
        elif rel == ">=":
            row[s] = Fraction(-1)
            s += 1
            row[a] = Fraction(1)
            basis.append(a)
            a += 1
        else:
            row[a] = Fraction(1)
            basis.append(a)
            a += 1
        T.append(row)

    def pivot(r, j):
        pr = T[r][j]
        T[r] = [v / pr for v in T[r]]
        for i in range(len(T)):
            if i != r and T[i][j] != 0:
                f = T[i][j]
                T[i] = [vi - f * vr for vi, vr in zip(T[i], T[r])]
        basis[r] = j

    def optimize(obj, allowed):
        # obj: cost vector over columns; maximize
        while True:
            red = [sum(obj[basis[i]] * T[i][j] for i in range(len(T))) - obj[j] for j in range(width)]
            enter = next((j for j in range(width) if allowed(j) and red[j] < 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i in range(len(T)):
                if T[i][enter] > 0:
                    ratio = T[i][-1] / T[i][enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], enter)

    if width > art_start:
        phase1 = [Fraction(0)] * art_start + [Fraction(-1)] * (width - art_start)
        optimize(phase1, lambda j: True)
        if any(basis[i] >= art_start and T[i][-1] != 0 for i in range(len(T))):
            return LpSolution("infeasible")
        i = 0
        while i < len(T):
            if basis[i] >= art_start:
                j = next((j for j in range(art_start) if T[i][j] != 0), None)
                if j is None:
                    del T[i]
                    del basis[i]
                    continue
                pivot(i, j)
            i += 1
    obj = cost + [Fraction(0)] * (width - N)
    if optimize(obj, lambda j: j < art_start) == "unbounded":
        return LpSolution("unbounded")
    y = [Fraction(0)] * width
    for i, j in enumerate(basis):
        y[j] = T[i][-1]
    x = list(offset)
    for k, (j, sgn) in enumerate(cols):
        x[j] += sgn * y[k]
    objective = sum(c_ex[j] * x[j] for j in range(n))
    return LpSolution("optimal", np.array(x, dtype=object), objective)
