"""Local geometry of a matroid polytope around a point.

A :class:`PolytopeView` lists the rank inequalities ``x(S) <= r(S)`` that can
matter for points supported inside a fixed element set, so moves that never
enlarge the support (pipage steps, decomposition rays) can be ratio-tested
exactly. Uniform and partition matroids need only singleton and block rows;
other variants get one row per subset of the support.
"""
from __future__ import annotations

import numpy as np

from .core import Matroid, PartitionMatroid, UniformMatroid, popcount, subset_sums
from .errors import CapacityError, StructuralError
from .lp import MAX_ENUM_SUPPORT

TIGHT_TOL = 1e-9
SNAP_TOL = 1e-8


def snap(x: np.ndarray, tol: float = SNAP_TOL) -> np.ndarray:
    """Round coordinates within ``tol`` of 0 or 1."""
    x = np.array(x, dtype=float)
    x[np.abs(x) <= tol] = 0.0
    x[np.abs(x - 1.0) <= tol] = 1.0
    return x


class PolytopeView:
    def __init__(self, m: Matroid, support=None):
        self.matroid = m
        n = m.ground_size
        self.n = n
        if isinstance(m, (UniformMatroid, PartitionMatroid)):
            if isinstance(m, UniformMatroid):
                blocks, caps = [tuple(range(n))], [m.k]
                block_of = np.zeros(n, dtype=np.int64)
            else:
                blocks, caps, block_of = m.blocks, m.caps, m.block_of
            rows, rhs = [], []
            for i in range(n):
                rows.append(1 << i)
                rhs.append(min(1, caps[block_of[i]]))
            for blk, cap in zip(blocks, caps):
                if len(blk) > 1:
                    rows.append(sum(1 << i for i in blk))
                    rhs.append(cap)
            self.rhs = np.array(rhs, dtype=float)
            self.matrix = np.array([[(r >> i) & 1 for i in range(n)] for r in rows], dtype=float)
            self.masks = None
            self.support = None
        else:
            support = list(range(n)) if support is None else sorted(int(s) for s in support)
            if len(support) > MAX_ENUM_SUPPORT:
                raise CapacityError(
                    f"support of size {len(support)} exceeds enumeration limit {MAX_ENUM_SUPPORT}")
            if n > 62:
                raise CapacityError("enumerated polytope views need ground size <= 62")
            self.support = support
            self.masks = subset_sums([1 << e for e in support], dtype=np.int64)[1:]
            self.rhs = m.subset_ranks(support)[1:].astype(float)
            self.matrix = None

    def row_dot(self, d: np.ndarray) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix @ d
        return subset_sums(np.asarray(d)[self.support])[1:]

    def slacks(self, x: np.ndarray) -> np.ndarray:
        return self.rhs - self.row_dot(x)

    def contains(self, x: np.ndarray, tol: float = 1e-7) -> bool:
        if np.any(x < -tol):
            return False
        if self.support is not None:
            outside = np.ones(self.n, dtype=bool)
            outside[self.support] = False
            if np.any(x[outside] > tol):
                return False
        return bool(np.all(self.slacks(x) >= -tol))

    def _tight_bits(self, x, tol):
        """0/1 matrix of tight rows (one row per tight inequality)."""
        tight = self.slacks(x) <= tol
        if self.matrix is not None:
            return self.matrix[tight]
        tm = self.masks[tight]
        return np.stack([(tm >> i) & 1 for i in range(self.n)], axis=1).astype(float) \
            if tm.size else np.zeros((0, self.n))

    def tight_masks(self, x: np.ndarray, tol: float = TIGHT_TOL) -> list[int]:
        bits = self._tight_bits(x, tol)
        return [sum(1 << int(i) for i in np.nonzero(row)[0]) for row in bits]

    def max_step(self, x: np.ndarray, d: np.ndarray, eps: float = 1e-12) -> float:
        """Largest ``t >= 0`` with ``x + t d`` still in the polytope."""
        t = np.inf
        ad = self.row_dot(d)
        grow = ad > eps
        if np.any(grow):
            t = min(t, float(np.min(np.maximum(self.slacks(x)[grow], 0.0) / ad[grow])))
        shrink = d < -eps
        if np.any(shrink):
            t = min(t, float(np.min(np.maximum(x[shrink], 0.0) / -d[shrink])))
        return t

    def tight_rank(self, x: np.ndarray, tol: float = TIGHT_TOL) -> int:
        """Number of linearly independent tight inequalities (incl. ``x_i >= 0``)."""
        bits = self._tight_bits(x, tol)
        zeros = np.eye(self.n)[x <= tol]
        rows = np.vstack([bits, zeros])
        if rows.shape[0] == 0:
            return 0
        return int(np.linalg.matrix_rank(np.unique(rows, axis=0)))

    def face_weights(self, x: np.ndarray, tol: float = TIGHT_TOL) -> np.ndarray:
        """Weights whose maximizers over the polytope are exactly the minimal face of ``x``.

        Each element scores the number of tight sets containing it; elements
        at zero get ``-1`` so greedy never picks them.
        """
        w = self._tight_bits(x, tol).sum(axis=0)
        w[x <= tol] = -1.0
        return w


def minimal_tight_sets(view: PolytopeView, x: np.ndarray, frac: list[int],
                       tol: float = TIGHT_TOL) -> dict[int, int]:
    """For each fractional element, the intersection of all tight sets containing it."""
    bits = view._tight_bits(x, tol).astype(bool)
    out = {}
    for i in frac:
        rows = bits[bits[:, i]]
        if rows.shape[0]:
            inter = np.logical_and.reduce(rows, axis=0)
            out[i] = sum(1 << int(k) for k in np.nonzero(inter)[0])
    return out


def pick_pipage_pair(view: PolytopeView, x: np.ndarray, frac: list[int]) -> tuple[int, int | None]:
    """Choose coordinates ``(i, j)`` whose exchange direction keeps every tight set tight.

    Returns ``(i, None)`` when a lone fractional coordinate lies in no tight set.
    """
    atoms = minimal_tight_sets(view, x, frac)
    if atoms:
        i = min(atoms, key=lambda k: (popcount(atoms[k]), k))
        inside = [k for k in frac if (atoms[i] >> k) & 1]
        if len(inside) < 2:
            raise StructuralError(
                f"tight set {sorted(k for k in range(view.n) if (atoms[i] >> k) & 1)} "
                "holds a single fractional coordinate")
        return inside[0], inside[1]
    if len(frac) >= 2:
        return frac[0], frac[1]
    return frac[0], None
