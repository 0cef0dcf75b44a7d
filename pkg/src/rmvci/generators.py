"""Seeded random instances for property tests, the acceptance run and ``check``."""
from __future__ import annotations

import numpy as np

from .core import (ExplicitMatroid, GraphicMatroid, Matroid, PartitionMatroid, UniformMatroid,
                   WeightedGraph, iter_bits, to_mask)
from .lp import LinearProgram
from .strategy import InterdictionStrategy

MATROID_KINDS = ("uniform", "partition", "graphic", "explicit")


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_graph(rng, n: int, density: float | None = None, parallel: bool = True) -> WeightedGraph:
    rng = rng_from(rng)
    density = rng.uniform(0.3, 0.9) if density is None else density
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                edges.append((u, v, _weight(rng)))
    if parallel and edges and rng.random() < 0.2:
        u, v, _ = edges[rng.integers(len(edges))]
        edges.append((v, u, _weight(rng)))
    if not edges and n >= 2:
        edges.append((0, 1, 1.0))
    return WeightedGraph(n, tuple(edges))


def _weight(rng) -> float:
    r = rng.random()
    if r < 0.05:
        return 0.0
    if r < 0.3:
        return float(rng.integers(1, 6))
    return float(rng.uniform(0.1, 3.0))


def random_uniform(rng, n: int) -> UniformMatroid:
    return UniformMatroid(n, int(rng_from(rng).integers(0, n + 1)))


def random_partition(rng, n: int) -> PartitionMatroid:
    rng = rng_from(rng)
    nb = int(rng.integers(1, max(1, n) + 1))
    label = rng.integers(0, nb, size=n)
    blocks = [tuple(int(i) for i in np.nonzero(label == b)[0]) for b in range(nb)]
    blocks = [b for b in blocks if b]
    caps = [int(rng.integers(0, len(b) + 1)) for b in blocks]
    return PartitionMatroid(n, tuple(blocks), tuple(caps))


def random_graphic(rng, n: int) -> GraphicMatroid:
    rng = rng_from(rng)
    nv = int(rng.integers(2, max(2, n) + 2))
    edges = []
    for _ in range(n):
        a, b = rng.choice(nv, size=2, replace=False)
        edges.append((int(a), int(b)))
    return GraphicMatroid(tuple(edges), nv)


def random_explicit(rng, n: int) -> ExplicitMatroid:
    """Family of a random partition or graphic matroid, sometimes truncated to a lower rank."""
    from .oracle import _independent_masks

    rng = rng_from(rng)
    base = random_graphic(rng, n) if rng.random() < 0.5 else random_partition(rng, n)
    masks = _independent_masks(base)
    r = base.rank()
    cut = int(rng.integers(0, r + 1)) if rng.random() < 0.4 else r
    return ExplicitMatroid(n, frozenset(m for m in masks if bin(m).count("1") <= cut))


def random_matroid(rng, n: int, kind: str | None = None) -> Matroid:
    rng = rng_from(rng)
    kind = kind or MATROID_KINDS[int(rng.integers(len(MATROID_KINDS)))]
    maker = {"uniform": random_uniform, "partition": random_partition,
             "graphic": random_graphic, "explicit": random_explicit}[kind]
    return maker(rng, n)


def random_independent_set(rng, m: Matroid) -> frozenset:
    """Greedy over a random order, stopped at a random size."""
    rng = rng_from(rng)
    n = m.ground_size
    stop = int(rng.integers(0, n + 1))
    mask = 0
    for i in rng.permutation(n):
        if bin(mask).count("1") >= stop:
            break
        if m._independent(mask | (1 << int(i))):
            mask |= 1 << int(i)
    return frozenset(iter_bits(mask))


def random_strategy(rng, g: WeightedGraph, ml: Matroid, max_support: int = 4) -> InterdictionStrategy:
    rng = rng_from(rng)
    k = int(rng.integers(1, max_support + 1))
    sets = [random_independent_set(rng, ml) for _ in range(k)]
    lam = rng.dirichlet(np.ones(k))
    return InterdictionStrategy.from_pairs(zip(lam, sets), g.vertex_count, leader=ml)


def random_polytope_point(rng, m: Matroid, vertices: int | None = None) -> np.ndarray:
    """Convex combination of a few independent-set indicator vectors."""
    rng = rng_from(rng)
    n = m.ground_size
    k = vertices or int(rng.integers(1, n + 2))
    lam = rng.dirichlet(np.ones(k))
    x = np.zeros(n)
    for w in lam:
        if rng.random() < 0.5:
            s, _ = m.greedy_max_weight(rng.random(n))
        else:
            s = random_independent_set(rng, m)
        x[list(s)] += w
    return np.clip(x, 0.0, 1.0)


def random_integral_point(rng, m: Matroid) -> np.ndarray:
    x = np.zeros(m.ground_size)
    x[list(random_independent_set(rng, m))] = 1.0
    return x


def random_instance(rng, n: int, leader_kind: str | None = None, follower_kind: str | None = None):
    """``(g, ml, mf)`` with independent random matroid kinds."""
    rng = rng_from(rng)
    g = random_graph(rng, n)
    return g, random_matroid(rng, n, leader_kind), random_matroid(rng, n, follower_kind)


def random_lp(rng, max_vars: int = 5, max_rows: int = 6) -> LinearProgram:
    """Small LP with integer data.

    Most are built around a planted feasible integer point; the rest have
    free right-hand sides and are often infeasible or unbounded.
    """
    rng = rng_from(rng)
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(1, max_rows + 1))
    c = rng.integers(-5, 6, size=n).astype(float)
    bounds = []
    for _ in range(n):
        r = rng.random()
        if r < 0.6:
            bounds.append((0.0, float(rng.integers(1, 8))))
        elif r < 0.8:
            bounds.append((0.0, np.inf))
        elif r < 0.9:
            bounds.append((float(rng.integers(-4, 1)), float(rng.integers(1, 5))))
        else:
            bounds.append((-np.inf, np.inf))
    planted = rng.random() < 0.8
    x0 = np.array([rng.integers(max(lo, -3), min(hi, 5) + 1) for lo, hi in bounds], dtype=float)
    constraints = []
    for _ in range(m):
        a = rng.integers(-4, 5, size=n).astype(float)
        rel = ("<=", ">=", "=")[int(rng.choice(3, p=[0.6, 0.3, 0.1]))]
        if planted:
            slack = 0.0 if rel == "=" else float(rng.integers(0, 4))
            rhs = a @ x0 + (slack if rel == "<=" else -slack)
        else:
            rhs = float(rng.integers(-3, 10))
        constraints.append((a, rel, float(rhs)))
    sense = "max" if rng.random() < 0.5 else "min"
    return LinearProgram.build(c, constraints, bounds, sense)
