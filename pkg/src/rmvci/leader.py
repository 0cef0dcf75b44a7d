"""The leader's problem: a linear surrogate, its min-max LP, and the 8/3 pipeline.

Replacing the joint survival weight ``w_e (1 - q_uv)`` with ``w_e (2 - q_u - q_v)``
makes the follower's relaxed objective depend on vertex marginals only and
overestimates it by at most a factor of two. Minimizing the worst-case
surrogate over the leader's matroid polytope is then a plain LP (solved here
by constraint generation, or in one shot for two uniform matroids), and
any convex decomposition of the optimal marginals into leader-independent
sets is an 8/3-approximate randomized interdiction strategy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Matroid, UniformMatroid, WeightedGraph, mask_to_set
from .errors import DecompositionError, InputError
from .follower import approx_follower, cutting_plane_cap
from .lp import Cut, LinearProgram, cutting_plane_maximize, separate_matroid_polytope, solve_lp
from .polytope import PolytopeView, snap
from .strategy import InterdictionStrategy, marginals_of

LEADER_TOL = 1e-8
EXACT_LIMIT = 2 ** 20


@dataclass(frozen=True)
class MarginalStrategy:
    """Vertex interdiction probabilities, a point of the leader's matroid polytope."""

    q: np.ndarray


def eval_Ltilde(g: WeightedGraph, q, x) -> float:
    """Surrogate payoff ``sum_v x_v (1 - q_v) W_v`` (``x`` a set or a fractional point)."""
    q = np.asarray(q, dtype=float)
    if isinstance(x, (set, frozenset)):
        xv = np.zeros(g.vertex_count)
        xv[list(x)] = 1.0
    else:
        xv = np.asarray(x, dtype=float)
    return float(np.sum(xv * (1.0 - q) * g.weighted_degree))


def surrogate_best_response(g: WeightedGraph, q, mf: Matroid) -> tuple[frozenset, float]:
    """Maximize the surrogate over the follower's independent sets (greedy)."""
    return mf.greedy_max_weight((1.0 - np.asarray(q, dtype=float)) * g.weighted_degree)


def _check_ground(g, *matroids):
    for m in matroids:
        if m.ground_size != g.vertex_count:
            raise InputError(f"matroid ground size {m.ground_size} != vertex count {g.vertex_count}")


def solve_leader_relaxed(g: WeightedGraph, ml: Matroid, mf: Matroid, tol: float = LEADER_TOL,
                         max_iterations: int | None = None) -> tuple[MarginalStrategy, float]:
    """min over ``q`` in the leader polytope of the best surrogate response, by constraint generation.

    The working LP lives in ``(q, t)``. Each round first looks for a violated
    rank inequality of the leader polytope, then for a follower set whose
    surrogate payoff exceeds ``t``.
    """
    _check_ground(g, ml, mf)
    n = g.vertex_count
    W = g.weighted_degree

    def follower_cut(members):
        a = np.zeros(n + 1)
        idx = list(members)
        a[idx] = -W[idx]
        a[n] = -1.0
        return Cut(a, -float(W[idx].sum()))

    x0, _ = surrogate_best_response(g, np.zeros(n), mf)
    start = follower_cut(x0)
    c = np.zeros(n + 1)
    c[n] = 1.0
    base = LinearProgram(c, start.a[None, :], ("<=",), [start.b],
                         np.zeros(n + 1), np.concatenate([np.ones(n), [np.inf]]), "min")

    def separate(point):
        q, t = point[:n], point[n]
        cut = separate_matroid_polytope(ml, q, min(tol, 1e-9))
        if cut is not None:
            return Cut(np.concatenate([cut.a, [0.0]]), cut.b)
        members, value = surrogate_best_response(g, q, mf)
        if value > t + tol:
            return follower_cut(members)
        return None

    sol = cutting_plane_maximize(base, separate, max_iterations or cutting_plane_cap(g), tol=min(tol, 1e-9))
    q = np.clip(sol.x[:n], 0.0, 1.0)
    return MarginalStrategy(q), float(sol.objective)


def solve_leader_uniform_dual(g: WeightedGraph, k_l: int, k_f: int) -> tuple[MarginalStrategy, float]:
    """Compact single LP for two uniform matroids (inner LP dualized, then merged).

    Variables are ``q`` (n), ``mu`` (1) and ``nu`` (n):
    ``min k_f mu + sum nu`` s.t. ``mu + nu_v + W_v q_v >= W_v``, ``sum q <= k_l``.
    """
    n = g.vertex_count
    if not (0 <= k_l <= n and 0 <= k_f <= n):
        raise InputError("uniform ranks must lie in [0, n]")
    W = g.weighted_degree
    c = np.concatenate([np.zeros(n), [float(k_f)], np.ones(n)])
    A = np.zeros((n + 1, 2 * n + 1))
    A[np.arange(n), np.arange(n)] = W
    A[np.arange(n), n] = 1.0
    A[np.arange(n), n + 1 + np.arange(n)] = 1.0
    A[n, :n] = 1.0
    lp = LinearProgram(c, A, (">=",) * n + ("<=",), np.concatenate([W, [k_l]]),
                       np.zeros(2 * n + 1), np.concatenate([np.ones(n), np.full(n + 1, np.inf)]), "min")
    sol = solve_lp(lp)
    if not sol.optimal:
        raise InputError(f"uniform dual LP is {sol.status}")
    return MarginalStrategy(np.clip(sol.x[:n], 0.0, 1.0)), float(sol.objective)


def caratheodory_decompose(ml: Matroid, q, tol: float = 1e-7) -> InterdictionStrategy:
    """Write ``q`` as a convex combination of at most ``n + 1`` independent sets.

    Repeatedly takes a vertex ``b`` of the smallest face containing the
    current point, walks from ``b`` through the point until another
    inequality becomes tight, and records ``b`` with the weight that makes
    the point a mixture of ``b`` and the exit point. The face dimension drops
    every round.
    """
    q = np.asarray(q.q if isinstance(q, MarginalStrategy) else q, dtype=float)
    n = ml.ground_size
    if q.shape != (n,):
        raise InputError(f"marginals have shape {q.shape}, expected ({n},)")
    if np.any(q < -tol) or separate_matroid_polytope(ml, np.clip(q, 0, None), tol) is not None:
        raise InputError("marginals lie outside the leader's matroid polytope")
    p = snap(np.clip(q, 0.0, None))
    view = PolytopeView(ml, support=np.nonzero(p > 0)[0])
    mass = 1.0
    pieces: list[tuple[float, int]] = []
    for _ in range(n + 2):
        face = view.face_weights(p)
        members, _ = ml.greedy_max_weight(face)
        b = np.zeros(n)
        b[list(members)] = 1.0
        bmask = sum(1 << i for i in members)
        d = p - b
        if np.max(np.abs(d), initial=0.0) <= 1e-12:
            pieces.append((mass, bmask))
            break
        lam = view.max_step(p, d, eps=1e-9)
        if not (lam > 1e-14 and np.isfinite(lam)):
            raise DecompositionError(f"ray from vertex {sorted(members)} cannot move (step {lam})")
        pieces.append((mass * lam / (1.0 + lam), bmask))
        mass /= 1.0 + lam
        p = snap(np.clip(p + lam * d, 0.0, None))
    else:
        raise DecompositionError("decomposition used more than n + 1 vertices")

    weights = np.array([w for w, _ in pieces])
    V = np.array([[(mk >> i) & 1 for i in range(n)] for _, mk in pieces], dtype=float)
    residual = np.max(np.abs(weights @ V - q), initial=0.0)
    if residual > 1e-12:
        # vertices are affinely independent, so the exact weights are unique
        M = np.vstack([V.T, np.ones(len(pieces))])
        polished, *_ = np.linalg.lstsq(M, np.concatenate([q, [1.0]]), rcond=None)
        if polished.min() >= -1e-12:
            polished = np.clip(polished, 0.0, None)
            if np.max(np.abs(polished @ V - q), initial=0.0) < residual:
                weights = polished
    pi = InterdictionStrategy.from_pairs(
        [(w, mask_to_set(mk)) for w, (_, mk) in zip(weights, pieces)], n, leader=ml)
    err = np.max(np.abs(_vertex_marginals(pi, n) - q), initial=0.0)
    if err > 1e-6:
        raise DecompositionError(f"reconstructed marginals off by {err}")
    return pi


def _vertex_marginals(pi: InterdictionStrategy, n: int) -> np.ndarray:
    out = np.zeros(n)
    for p, s in pi.support:
        out[list(s)] += p
    return out


@dataclass(frozen=True)
class SolveCertificate:
    """Outcome of the 8/3 pipeline.

    ``theta_achieved`` is the follower's best-response value against
    ``pi_prime`` when it could be computed exactly; otherwise it is the
    rounded attack's value and ``theta_upper`` the LP relaxation bound.
    ``lower_bound`` is 3/8 of the surrogate optimum and never exceeds the
    optimal interdiction value.
    """

    pi_prime: InterdictionStrategy
    q_prime: np.ndarray
    surrogate_value: float
    lower_bound: float
    theta_achieved: float
    theta_upper: float
    theta_exact: bool
    guaranteed_ratio: float
    attack_set: frozenset
    method: str

    @property
    def theta_interval(self) -> tuple[float, float]:
        return self.theta_achieved, self.theta_upper


def solve_rmvci(g: WeightedGraph, ml: Matroid, mf: Matroid, method: str = "auto",
                tol: float = LEADER_TOL, exact_limit: int = EXACT_LIMIT) -> SolveCertificate:
    """Randomized interdiction strategy within 8/3 of optimal, with a certificate.

    ``method`` is ``"cutting-plane"``, ``"uniform-dual"`` or ``"auto"`` (the
    dual when both matroids are uniform).
    """
    from .oracle import count_independent_sets, solve_follower_ilp_bruteforce

    _check_ground(g, ml, mf)
    both_uniform = isinstance(ml, UniformMatroid) and isinstance(mf, UniformMatroid)
    if method == "auto":
        method = "uniform-dual" if both_uniform else "cutting-plane"
    if method == "uniform-dual":
        if not both_uniform:
            raise InputError("the uniform dual needs uniform leader and follower matroids")
        qs, surrogate = solve_leader_uniform_dual(g, ml.k, mf.k)
    elif method == "cutting-plane":
        qs, surrogate = solve_leader_relaxed(g, ml, mf, tol)
    else:
        raise InputError(f"unknown method {method!r}")
    pi = caratheodory_decompose(ml, qs.q)
    q_prime = marginals_of(g, pi).q

    if count_independent_sets(mf, exact_limit) is not None:
        attack, theta = solve_follower_ilp_bruteforce(g, pi, mf)
        upper, exact = theta, True
    else:
        sol = approx_follower(g, pi, mf)
        attack, theta, upper, exact = sol.attack_set, sol.ilp_value, max(sol.lp_value, sol.ilp_value), False

    lower = 3.0 / 8.0 * surrogate
    if lower > 1e-12:
        ratio = upper / lower
    else:
        ratio = 1.0 if upper <= 1e-9 else float("inf")
    return SolveCertificate(pi, q_prime, surrogate, lower, theta, upper, exact, ratio, attack, method)
