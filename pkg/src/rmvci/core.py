"""Graphs, matroid oracles, rank, greedy optimization and coverage.

Vertex sets travel through the public API as ``frozenset`` of vertex ids
and internally as Python ``int`` bitmasks (bit ``i`` set iff vertex ``i``
belongs to the set). Every function that takes a vertex set accepts either
form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InputError

VertexSetLike = Union[int, Iterable[int]]


# ---------------------------------------------------------------------------
# bitmask helpers

def to_mask(s: VertexSetLike, n: int | None = None) -> int:
    """Convert a vertex set (iterable of ids or bitmask) to a bitmask.

    When ``n`` is given, ids outside ``[0, n)`` raise :class:`InputError`.
    """
    if isinstance(s, (int, np.integer)) and not isinstance(s, bool):
        mask = int(s)
        if mask < 0:
            raise InputError("negative bitmask")
    else:
        mask = 0
        for v in s:
            v = int(v)
            if v < 0:
                raise InputError(f"vertex id {v} is negative")
            mask |= 1 << v
    if n is not None and mask >> n:
        raise InputError(
            f"vertex set {sorted(iter_bits(mask))} not contained in ground set of size {n}")
    return mask


def iter_bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_to_set(mask: int) -> frozenset:
    return frozenset(iter_bits(mask))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def subset_sums(values: Sequence[float], dtype=float) -> np.ndarray:
    """Sums of ``values`` over all ``2**len(values)`` index subsets.

    Entry ``m`` holds the sum of ``values[b]`` over the set bits ``b`` of ``m``.
    """
    out = np.zeros(1, dtype=dtype)
    for v in values:
        out = np.concatenate([out, out + v])
    return out


# ---------------------------------------------------------------------------
# graphs

@dataclass(frozen=True)
class WeightedGraph:
    """Undirected edge-weighted multigraph on vertices ``0..vertex_count-1``."""

    vertex_count: int
    edges: tuple = ()

    def __post_init__(self):
        n = int(self.vertex_count)
        if n < 1:
            raise InputError("vertex_count must be a positive integer")
        clean = []
        for k, e in enumerate(self.edges):
            try:
                u, v, w = e
            except (TypeError, ValueError):
                raise InputError(f"edge {k} must be a (u, v, w) triple") from None
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge {k} = ({u}, {v}) has an endpoint outside [0, {n})")
            if u == v:
                raise InputError(f"edge {k} is a self-loop on vertex {u}")
            if not np.isfinite(w) or w < 0:
                raise InputError(f"edge {k} has invalid weight {w}")
            clean.append((u, v, w))
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "edges", tuple(clean))

    @classmethod
    def complete(cls, n: int, weight: float = 1.0) -> "WeightedGraph":
        return cls(n, tuple((u, v, weight) for u in range(n) for v in range(u + 1, n)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        u = np.array([e[0] for e in self.edges], dtype=np.int64)
        v = np.array([e[1] for e in self.edges], dtype=np.int64)
        return u, v

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([e[2] for e in self.edges], dtype=float)

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        """``W_v``: total weight of edges incident to each vertex."""
        deg = np.zeros(self.vertex_count)
        u, v = self.endpoints
        np.add.at(deg, u, self.weights)
        np.add.at(deg, v, self.weights)
        return deg

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())


def coverage_weight(g: WeightedGraph, s: VertexSetLike) -> float:
    """Total weight of edges with at least one endpoint in ``s``."""
    mask = to_mask(s, g.vertex_count)
    return float(sum(w for u, v, w in g.edges if (mask >> u) & 1 or (mask >> v) & 1))


def coverage_of_masks(g: WeightedGraph, masks: np.ndarray) -> np.ndarray:
    """Vectorized :func:`coverage_weight` over an int64 array of bitmasks."""
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros(masks.shape, dtype=float)
    for u, v, w in g.edges:
        hit = ((masks >> u) | (masks >> v)) & 1
        out += w * hit
    return out


# ---------------------------------------------------------------------------
# matroids

class Matroid:
    """Independence-oracle matroid on ground set ``{0, ..., ground_size-1}``.

    Subclasses implement ``_independent(mask)``; everything else (rank,
    greedy, subset rank tables) is derived from it unless a closed form is
    cheaper.
    """

    ground_size: int
    kind: str = "abstract"

    def _independent(self, mask: int) -> bool:
        raise NotImplementedError

    def mask(self, s: VertexSetLike) -> int:
        return to_mask(s, self.ground_size)

    def is_independent(self, s: VertexSetLike) -> bool:
        return self._independent(self.mask(s))

    def rank(self, s: VertexSetLike | None = None) -> int:
        """Greedy scan: keep an element whenever the kept set stays independent."""
        mask = (1 << self.ground_size) - 1 if s is None else self.mask(s)
        kept = 0
        size = 0
        for i in iter_bits(mask):
            if self._independent(kept | (1 << i)):
                kept |= 1 << i
                size += 1
        return size

    def greedy_max_weight(self, weights) -> tuple[frozenset, float]:
        """Maximum-weight independent set by the matroid greedy algorithm.

        Nonpositive weights are skipped; equal weights are scanned in
        ascending id order.
        """
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.ground_size,):
            raise InputError(f"weight vector has shape {w.shape}, expected ({self.ground_size},)")
        if not np.all(np.isfinite(w)):
            raise InputError("weights must be finite")
        order = sorted(range(self.ground_size), key=lambda i: (-w[i], i))
        kept = 0
        total = 0.0
        for i in order:
            if w[i] <= 0:
                break
            if self._independent(kept | (1 << i)):
                kept |= 1 << i
                total += float(w[i])
        return mask_to_set(kept), total

    def subset_ranks(self, elements: Sequence[int]) -> np.ndarray:
        """Ranks of all subsets of ``elements``; entry ``m`` picks bits of ``m``."""
        return _subset_ranks(self, tuple(int(e) for e in elements))

    def _rank_table(self, elements: tuple) -> np.ndarray:
        # fallback: one greedy rank per subset
        full = subset_sums([1 << e for e in elements], dtype=object)
        return np.array([self.rank(int(m)) for m in full], dtype=np.int64)

    def to_dict(self) -> dict:
        raise NotImplementedError


@lru_cache(maxsize=256)
def _subset_ranks(m: Matroid, elements: tuple) -> np.ndarray:
    table = m._rank_table(elements)
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=True)
class UniformMatroid(Matroid):
    ground_size: int
    k: int
    kind = "uniform"

    def __post_init__(self):
        if self.ground_size < 0 or not (0 <= self.k <= self.ground_size):
            raise InputError(f"uniform matroid needs 0 <= k <= n, got k={self.k}, n={self.ground_size}")

    def _independent(self, mask):
        return popcount(mask) <= self.k

    def rank(self, s=None):
        mask = (1 << self.ground_size) - 1 if s is None else self.mask(s)
        return min(popcount(mask), self.k)

    def _rank_table(self, elements):
        sizes = subset_sums([1] * len(elements), dtype=np.int64)
        return np.minimum(sizes, self.k)

    def to_dict(self):
        return {"type": "uniform", "rank": self.k}


@dataclass(frozen=True, eq=True)
class PartitionMatroid(Matroid):
    ground_size: int
    blocks: tuple
    caps: tuple
    kind = "partition"

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(v) for v in b)) for b in self.blocks)
        caps = tuple(int(c) for c in self.caps)
        if len(blocks) != len(caps):
            raise InputError("partition matroid needs one cap per block")
        if any(c < 0 for c in caps):
            raise InputError("partition caps must be nonnegative")
        seen = sorted(v for b in blocks for v in b)
        if seen != list(range(self.ground_size)):
            raise InputError("partition blocks must partition {0..n-1}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "caps", caps)

    @cached_property
    def block_of(self) -> np.ndarray:
        out = np.empty(self.ground_size, dtype=np.int64)
        for b, blk in enumerate(self.blocks):
            out[list(blk)] = b
        return out

    @cached_property
    def block_masks(self) -> tuple:
        return tuple(to_mask(b) for b in self.blocks)

    def _independent(self, mask):
        return all(popcount(mask & bm) <= c for bm, c in zip(self.block_masks, self.caps))

    def rank(self, s=None):
        mask = (1 << self.ground_size) - 1 if s is None else self.mask(s)
        return sum(min(popcount(mask & bm), c) for bm, c in zip(self.block_masks, self.caps))

    def _rank_table(self, elements):
        total = np.zeros(1 << len(elements), dtype=np.int64)
        for b, c in enumerate(self.caps):
            counts = subset_sums([1 if self.block_of[e] == b else 0 for e in elements], dtype=np.int64)
            total += np.minimum(counts, c)
        return total

    def to_dict(self):
        return {"type": "partition", "blocks": [list(b) for b in self.blocks], "caps": list(self.caps)}


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


@dataclass(frozen=True, eq=True)
class GraphicMatroid(Matroid):
    """Cycle matroid: ground element ``i`` is edge ``edges[i]`` of an auxiliary graph."""

    edges: tuple
    aux_vertex_count: int = field(default=-1)
    kind = "graphic"

    def __post_init__(self):
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        nv = self.aux_vertex_count
        if nv < 0:
            nv = 1 + max((max(a, b) for a, b in edges), default=-1)
        if any(min(a, b) < 0 or max(a, b) >= nv for a, b in edges):
            raise InputError("graphic matroid edge endpoint outside auxiliary vertex range")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "aux_vertex_count", nv)

    @property
    def ground_size(self) -> int:
        return len(self.edges)

    def _independent(self, mask):
        uf = _UnionFind(self.aux_vertex_count)
        for i in iter_bits(mask):
            a, b = self.edges[i]
            if not uf.union(a, b):
                return False
        return True

    def _rank_table(self, elements):
        s = len(elements)
        idx = np.arange(1 << s, dtype=np.int64)
        labels = np.tile(np.arange(self.aux_vertex_count, dtype=np.int32), (1 << s, 1))
        rank = np.zeros(1 << s, dtype=np.int64)
        for b, e in enumerate(elements):
            a, c = self.edges[e]
            rows = np.nonzero((idx >> b) & 1)[0]
            la, lc = labels[rows, a], labels[rows, c]
            merged = la != lc
            rank[rows] += merged
            hi, lo = np.maximum(la, lc), np.minimum(la, lc)
            sub = labels[rows]
            labels[rows] = np.where(sub == hi[:, None], lo[:, None], sub)
        return rank

    def to_dict(self):
        return {"type": "graphic", "edges": [list(e) for e in self.edges],
                "aux_vertex_count": self.aux_vertex_count}


@dataclass(frozen=True, eq=True)
class ExplicitMatroid(Matroid):
    """Matroid given by its independent-set family (bitmasks), closed downward."""

    ground_size: int
    family: frozenset
    kind = "explicit"

    def __post_init__(self):
        n = self.ground_size
        masks = {to_mask(s, n) for s in self.family} | {0}
        closed = set()
        stack = list(masks)
        while stack:
            m = stack.pop()
            if m in closed:
                continue
            closed.add(m)
            for i in iter_bits(m):
                sub = m & ~(1 << i)
                if sub not in closed:
                    stack.append(sub)
        object.__setattr__(self, "family", frozenset(closed))
        if n <= 16:
            self._check_exchange()

    @cached_property
    def family_array(self) -> np.ndarray:
        return np.array(sorted(self.family), dtype=np.int64)

    def _independent(self, mask):
        return mask in self.family

    def _rank_table(self, elements):
        s = len(elements)
        full = subset_sums([1 << e for e in elements], dtype=np.int64)
        size = subset_sums([1] * s, dtype=np.int64)
        indep = np.isin(full, self.family_array)
        rank = np.where(indep, size, -1)
        idx = np.arange(1 << s, dtype=np.int64)
        for k in range(1, s + 1):
            layer = idx[(size == k) & ~indep]
            if layer.size == 0:
                continue
            best = np.full(layer.shape, -1, dtype=np.int64)
            for b in range(s):
                has = (layer >> b) & 1 == 1
                best[has] = np.maximum(best[has], rank[layer[has] ^ (1 << b)])
            rank[layer] = best
        return rank

    def _check_exchange(self):
        # Augmentation holds iff no independent A is maximal inside a set of larger rank.
        n = self.ground_size
        ranks = self.subset_ranks(range(n))
        full = (1 << n) - 1
        for a in self.family:
            ext = 0
            for i in range(n):
                if not (a >> i) & 1 and (a | (1 << i)) in self.family:
                    ext |= 1 << i
            if ranks[full & ~ext] != popcount(a):
                raise InputError(
                    f"explicit family violates the exchange property at {sorted(iter_bits(a))}")

    def to_dict(self):
        maximal = [m for m in self.family
                   if not any((m | (1 << i)) in self.family for i in range(self.ground_size) if not (m >> i) & 1)]
        return {"type": "explicit",
                "independent_sets": [sorted(iter_bits(m)) for m in sorted(maximal)]}


def explicit_from(m: Matroid) -> ExplicitMatroid:
    """Materialize any matroid as an :class:`ExplicitMatroid` (small ground sets)."""
    from .oracle import enumerate_independent_sets
    return ExplicitMatroid(m.ground_size, frozenset(to_mask(s) for s in enumerate_independent_sets(m)))


# ---------------------------------------------------------------------------
# functional API

def is_independent(m: Matroid, s: VertexSetLike) -> bool:
    return m.is_independent(s)


def rank(m: Matroid, s: VertexSetLike) -> int:
    return m.rank(s)


def greedy_max_weight(m: Matroid, weights) -> tuple[frozenset, float]:
    return m.greedy_max_weight(weights)
