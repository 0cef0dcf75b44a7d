"""The follower's best-response problem against a fixed leader strategy.

The LP relaxation is solved with rank cuts over the follower's matroid
polytope; the fractional optimum is then pipage-rounded along exchange
directions ``e_i - e_j`` in which the multilinear surrogate ``F`` is convex,
never letting ``F`` drop. Since ``F >= 3/4 L`` on the polytope and ``F = L``
at integer points, the rounded set is worth at least 3/4 of the LP value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Matroid, WeightedGraph, mask_to_set
from .errors import StructuralError
from .lp import SEPARATION_TOL, Cut, LinearProgram, cutting_plane_maximize, separate_matroid_polytope
from .polytope import PolytopeView, pick_pipage_pair, snap
from .strategy import EffectiveWeights, InterdictionStrategy, expected_payoff, strategy_weights


def eval_L(g: WeightedGraph, ew: EffectiveWeights, x) -> float:
    """LP objective after substituting the optimal ``z_e = max(0, x_u + x_v - 1)``."""
    x = np.asarray(x, dtype=float)
    u, v = g.endpoints
    z = np.maximum(0.0, x[u] + x[v] - 1.0)
    return float(np.sum(x[u] * ew.wu + x[v] * ew.wv + z * ew.pair_coeff))


def eval_F(g: WeightedGraph, ew: EffectiveWeights, x) -> float:
    """Multilinear extension: ``z_e`` replaced by the product ``x_u x_v``."""
    x = np.asarray(x, dtype=float)
    u, v = g.endpoints
    return float(np.sum(x[u] * ew.wu + x[v] * ew.wv + x[u] * x[v] * ew.pair_coeff))


def cutting_plane_cap(g: WeightedGraph) -> int:
    n = g.vertex_count
    return max(10, 10 * n * (n + g.edge_count))


def solve_follower_lp(g: WeightedGraph, ew: EffectiveWeights, mf: Matroid,
                      tol: float = SEPARATION_TOL, max_iterations: int | None = None):
    """Maximize the relaxed follower objective over ``(x, z)``.

    Returns ``(x, lp_value)``. Raises :class:`NonConvergenceError` if the
    cutting-plane loop runs out of rounds.
    """
    n, m = g.vertex_count, g.edge_count
    u, v = g.endpoints
    c = np.zeros(n + m)
    np.add.at(c, u, ew.wu)
    np.add.at(c, v, ew.wv)
    c[n:] = ew.pair_coeff
    # z_e - x_u - x_v >= -1; z_e <= 1 is left implicit: at any vertex z_e is
    # 0 or x_u + x_v - 1, both at most 1
    A = np.zeros((m, n + m))
    A[np.arange(m), n + np.arange(m)] = 1.0
    np.add.at(A, (np.arange(m), u), -1.0)
    np.add.at(A, (np.arange(m), v), -1.0)
    hi = np.concatenate([np.ones(n), np.full(m, np.inf)])
    base = LinearProgram(c, A, (">=",) * m, -np.ones(m), np.zeros(n + m), hi, "max")

    def separate(point):
        cut = separate_matroid_polytope(mf, point[:n], tol)
        if cut is None:
            return None
        return Cut(np.concatenate([cut.a, np.zeros(m)]), cut.b)

    sol = cutting_plane_maximize(base, separate, max_iterations or cutting_plane_cap(g), tol)
    x = np.clip(sol.x[:n], 0.0, 1.0)
    value = eval_L(g, ew, x)
    if abs(value - sol.objective) > 1e-6 * max(1.0, abs(value)):
        raise AssertionError(f"LP value {sol.objective} disagrees with L(x) = {value}")
    return x, value


@dataclass(frozen=True)
class PipageStep:
    x: np.ndarray
    F: float
    tight_rank: int
    pair: tuple


@dataclass(frozen=True)
class PipageResult:
    attack_set: frozenset
    x: np.ndarray
    steps: tuple = field(default=())

    @property
    def F_values(self) -> list[float]:
        return [s.F for s in self.steps]


def pipage_trace(g: WeightedGraph, ew: EffectiveWeights, mf: Matroid, x) -> PipageResult:
    """Round a point of the follower polytope to an independent set, recording each step."""
    n = g.vertex_count
    x = snap(np.clip(np.asarray(x, dtype=float), 0.0, 1.0))
    view = PolytopeView(mf, support=np.nonzero(x > 0)[0])
    steps = [PipageStep(x.copy(), eval_F(g, ew, x), view.tight_rank(x), ())]
    for _ in range(2 * n + 2):
        frac = [int(i) for i in np.nonzero((x > 0) & (x < 1))[0]]
        if not frac:
            break
        i, j = pick_pipage_pair(view, x, frac)
        d = np.zeros(n)
        d[i] = 1.0
        if j is None:
            # F is nondecreasing in each coordinate, so raising x_i alone is safe
            alpha = view.max_step(x, d)
            if not alpha > 0:
                raise StructuralError(f"coordinate {i} is fractional but cannot move")
            x = snap(x + alpha * d)
            pair = (i,)
        else:
            d[j] = -1.0
            alpha = view.max_step(x, d)
            beta = view.max_step(x, -d)
            if not (alpha > 0 and beta > 0):
                raise StructuralError(f"exchange pair ({i}, {j}) is blocked: alpha={alpha}, beta={beta}")
            xa, xb = x + alpha * d, x - beta * d
            x = snap(xa if eval_F(g, ew, xa) >= eval_F(g, ew, xb) else xb)
            pair = (i, j)
        steps.append(PipageStep(x.copy(), eval_F(g, ew, x), view.tight_rank(x), pair))
    else:
        raise StructuralError("pipage rounding did not reach an integral point")
    mask = sum(1 << int(k) for k in np.nonzero(x > 0.5)[0])
    if not mf._independent(mask):
        raise StructuralError(f"rounded set {sorted(mask_to_set(mask))} is not independent")
    return PipageResult(mask_to_set(mask), x, tuple(steps))


def pipage_round(g: WeightedGraph, ew: EffectiveWeights, mf: Matroid, x) -> frozenset:
    return pipage_trace(g, ew, mf, x).attack_set


@dataclass(frozen=True)
class FollowerSolution:
    attack_set: frozenset
    ilp_value: float
    lp_value: float
    ratio_bound: float
    lp_point: np.ndarray
    rounding: PipageResult


def approx_follower(g: WeightedGraph, pi: InterdictionStrategy, mf: Matroid,
                    tol: float = SEPARATION_TOL) -> FollowerSolution:
    """LP relaxation plus pipage rounding: a 4/3-approximate best response."""
    ew = strategy_weights(g, pi)
    x, lp_value = solve_follower_lp(g, ew, mf, tol)
    rounding = pipage_trace(g, ew, mf, x)
    value = expected_payoff(g, pi, rounding.attack_set)
    if value > 1e-12:
        ratio = lp_value / value
    else:
        ratio = 1.0 if lp_value <= 1e-9 else float("inf")
    return FollowerSolution(rounding.attack_set, value, lp_value, ratio, x, rounding)
