"""Leader mixed strategies, their pairwise marginals and expected payoffs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import Matroid, VertexSetLike, WeightedGraph, coverage_weight, mask_to_set, to_mask
from .errors import InputError, InvalidMarginalsError

NORMALIZE_TOL = 1e-6
PAYOFF_TOL = 1e-9
BOUND_TOL = 1e-9


@dataclass(frozen=True)
class InterdictionStrategy:
    """Finite-support distribution over leader-independent vertex sets.

    ``support`` is a tuple of ``(probability, frozenset)`` pairs with distinct
    sets and probabilities summing to one.
    """

    ground_size: int
    support: tuple

    @classmethod
    def from_pairs(cls, pairs: Iterable, ground_size: int, leader: Matroid | None = None,
                   tol: float = NORMALIZE_TOL) -> "InterdictionStrategy":
        """Validate, merge duplicate sets, drop zero mass and renormalize.

        Total mass within ``tol`` of one is rescaled; anything further off is
        rejected.
        """
        merged: dict[int, float] = {}
        for pair in pairs:
            try:
                p, s = pair
            except (TypeError, ValueError):
                raise InputError("strategy entries must be (probability, set) pairs") from None
            p = float(p)
            if not np.isfinite(p) or p < -1e-12:
                raise InputError(f"invalid probability {p}")
            mask = to_mask(s, ground_size)
            if leader is not None and not leader._independent(mask):
                raise InputError(f"support set {sorted(mask_to_set(mask))} is not leader-independent")
            merged[mask] = merged.get(mask, 0.0) + max(p, 0.0)
        total = sum(merged.values())
        if abs(total - 1.0) > tol:
            raise InputError(f"probabilities sum to {total}, not 1")
        support = tuple((p / total, mask_to_set(m)) for m, p in sorted(merged.items()) if p > 0)
        return cls(ground_size, support)

    @classmethod
    def null(cls, ground_size: int) -> "InterdictionStrategy":
        return cls(ground_size, ((1.0, frozenset()),))

    @classmethod
    def pure(cls, ground_size: int, s: VertexSetLike) -> "InterdictionStrategy":
        return cls(ground_size, ((1.0, mask_to_set(to_mask(s, ground_size))),))

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.support])

    @property
    def masks(self) -> list[int]:
        return [to_mask(s) for _, s in self.support]

    def __len__(self):
        return len(self.support)

    def is_feasible_for(self, leader: Matroid) -> bool:
        return all(leader.is_independent(s) for _, s in self.support)


@dataclass(frozen=True)
class PairwiseMarginals:
    """Per-vertex interdiction probabilities ``q`` and per-edge joint ``q_pair``.

    ``q_pair[k]`` is the probability that both endpoints of ``g.edges[k]`` are
    interdicted.
    """

    q: np.ndarray
    q_pair: np.ndarray

    def violations(self, g: WeightedGraph, tol: float = BOUND_TOL) -> list[str]:
        out = []
        q, qp = self.q, self.q_pair
        if q.shape != (g.vertex_count,) or qp.shape != (g.edge_count,):
            return ["marginal arrays do not match the graph"]
        for v in np.nonzero((q < -tol) | (q > 1 + tol))[0]:
            out.append(f"q[{v}]={q[v]} outside [0, 1]")
        u, v = g.endpoints
        lo = np.maximum(0.0, q[u] + q[v] - 1.0)
        hi = np.minimum(q[u], q[v])
        for k in np.nonzero((qp < lo - tol) | (qp > hi + tol))[0]:
            out.append(f"edge {k}: q_uv={qp[k]} outside [{lo[k]}, {hi[k]}]")
        return out


@dataclass(frozen=True)
class EffectiveWeights:
    """Per-edge survival-discounted weights ``w^u``, ``w^v`` and ``w^{uv}``."""

    wu: np.ndarray
    wv: np.ndarray
    wuv: np.ndarray

    @property
    def pair_coeff(self) -> np.ndarray:
        """``w^{uv} - w^u - w^v``; nonpositive for marginals of a real distribution."""
        return self.wuv - self.wu - self.wv


def marginals_of(g: WeightedGraph, pi: InterdictionStrategy) -> PairwiseMarginals:
    if pi.ground_size != g.vertex_count:
        raise InputError("strategy and graph have different vertex counts")
    q = np.zeros(g.vertex_count)
    u, v = g.endpoints
    qp = np.zeros(g.edge_count)
    for p, s in pi.support:
        ind = np.zeros(g.vertex_count, dtype=bool)
        ind[list(s)] = True
        q += p * ind
        qp += p * (ind[u] & ind[v])
    return PairwiseMarginals(q, qp)


def pair_coeff_violations(ew: EffectiveWeights, g: WeightedGraph, tol: float = 1e-12) -> list[int]:
    """Edge indices whose pair coefficient is positive beyond rounding."""
    scale = np.maximum(1.0, g.weights)
    return [int(k) for k in np.nonzero(ew.pair_coeff > tol * scale)[0]]


def effective_weights(g: WeightedGraph, pm: PairwiseMarginals) -> EffectiveWeights:
    bad = pm.violations(g)
    if bad:
        raise InvalidMarginalsError("; ".join(bad[:5]))
    u, v = g.endpoints
    w = g.weights
    ew = EffectiveWeights(w * (1 - pm.q[u]), w * (1 - pm.q[v]), w * (1 - pm.q_pair))
    broken = pair_coeff_violations(ew, g)
    if broken:
        raise InvalidMarginalsError(f"pair coefficient positive on edges {broken[:5]}")
    return ew


def strategy_weights(g: WeightedGraph, pi: InterdictionStrategy) -> EffectiveWeights:
    return effective_weights(g, marginals_of(g, pi))


def payoff_closed_form(g: WeightedGraph, ew: EffectiveWeights, x: VertexSetLike) -> float:
    """Bilinear ILP objective with ``z_e = x_u x_v`` at a 0/1 point."""
    mask = to_mask(x, g.vertex_count)
    ind = np.array([(mask >> i) & 1 for i in range(g.vertex_count)], dtype=float)
    u, v = g.endpoints
    return float(np.sum(ind[u] * ew.wu + ind[v] * ew.wv + ind[u] * ind[v] * ew.pair_coeff))


def expected_payoff(g: WeightedGraph, pi: InterdictionStrategy, x: VertexSetLike) -> float:
    """Expected weight covered by ``x`` minus a random interdicted set drawn from ``pi``.

    Computed directly over the support and cross-checked against the
    closed form in effective weights.
    """
    mask = to_mask(x, g.vertex_count)
    direct = 0.0
    for p, s in pi.support:
        direct += p * coverage_weight(g, mask & ~to_mask(s))
    closed = payoff_closed_form(g, strategy_weights(g, pi), mask)
    if abs(direct - closed) > PAYOFF_TOL * max(1.0, g.total_weight):
        raise AssertionError(f"payoff mismatch: direct {direct} vs closed form {closed}")
    return direct
