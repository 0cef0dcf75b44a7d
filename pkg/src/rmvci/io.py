"""JSON instance and report files.

An instance file looks like::

    {
      "graph": {"vertex_count": 3, "edges": [[0, 1, 1.0], [1, 2, 2.5]]},
      "leader": {"type": "uniform", "rank": 1},
      "follower": {"type": "partition", "blocks": [[0, 1], [2]], "caps": [1, 1]},
      "strategy": [{"probability": 0.5, "set": [0]}, {"probability": 0.5, "set": [1]}],
      "marginals": [0.5, 0.5, 0.0]
    }

``strategy`` and ``marginals`` are optional. Matroid objects take one of
``{"type": "uniform", "rank": k}``,
``{"type": "partition", "blocks": [...], "caps": [...]}``,
``{"type": "graphic", "edges": [[a, b], ...], "aux_vertex_count": m}`` (one
auxiliary edge per vertex) or ``{"type": "explicit", "independent_sets": [...]}``
(closed downward on load).
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (ExplicitMatroid, GraphicMatroid, Matroid, PartitionMatroid, UniformMatroid,
                   WeightedGraph, to_mask)
from .errors import InputError
from .strategy import InterdictionStrategy

SIG_DIGITS = 12


@dataclass(frozen=True)
class Instance:
    graph: WeightedGraph
    leader: Matroid
    follower: Matroid
    strategy: InterdictionStrategy | None = None
    marginals: np.ndarray | None = None
    digest: str = ""


def real(x: float) -> float:
    """Round to 12 significant digits for output."""
    x = float(x)
    if not np.isfinite(x):
        return x
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0


def reals(xs) -> list[float]:
    return [real(x) for x in np.asarray(xs, dtype=float).ravel()]


def _need(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise InputError(f"{where}: expected an object")
    if key not in d:
        raise InputError(f"{where}.{key}: missing")
    return d[key]


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or int(x) != x:
        raise InputError(f"{where}: expected an integer, got {x!r}")
    return int(x)


def _num(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not np.isfinite(x):
        raise InputError(f"{where}: expected a finite number, got {x!r}")
    return float(x)


def _int_list(xs, where: str) -> list[int]:
    if not isinstance(xs, list):
        raise InputError(f"{where}: expected a list")
    return [_int(x, f"{where}[{i}]") for i, x in enumerate(xs)]


def graph_from_dict(d: dict) -> WeightedGraph:
    edges_raw = _need(d, "edges", "graph")
    if not isinstance(edges_raw, list):
        raise InputError("graph.edges: expected a list")
    edges = []
    for i, e in enumerate(edges_raw):
        where = f"graph.edges[{i}]"
        if not isinstance(e, list) or len(e) not in (2, 3):
            raise InputError(f"{where}: expected [u, v] or [u, v, w]")
        w = _num(e[2], f"{where}[2]") if len(e) == 3 else 1.0
        if w < 0:
            raise InputError(f"{where}[2]: weight must be nonnegative")
        u, v = _int(e[0], f"{where}[0]"), _int(e[1], f"{where}[1]")
        if u < 0 or v < 0:
            raise InputError(f"{where}: negative vertex id")
        if u == v:
            raise InputError(f"{where}: self-loop at vertex {u}")
        edges.append((u, v, w))
    top = 1 + max((max(u, v) for u, v, _ in edges), default=-1)
    if "vertex_count" in d:
        n = _int(d["vertex_count"], "graph.vertex_count")
        if n < top:
            raise InputError(f"graph.vertex_count: {n} is smaller than edge endpoint {top - 1} allows")
    else:
        n = top
    if n < 1:
        raise InputError("graph.vertex_count: must be positive")
    return WeightedGraph(n, tuple(edges))


def matroid_from_dict(d: dict, n: int, where: str) -> Matroid:
    kind = _need(d, "type", where)
    try:
        if kind == "uniform":
            return UniformMatroid(n, _int(_need(d, "rank", where), f"{where}.rank"))
        if kind == "partition":
            blocks = _need(d, "blocks", where)
            if not isinstance(blocks, list):
                raise InputError(f"{where}.blocks: expected a list")
            blocks = [_int_list(b, f"{where}.blocks[{i}]") for i, b in enumerate(blocks)]
            caps = _int_list(_need(d, "caps", where), f"{where}.caps")
            return PartitionMatroid(n, tuple(map(tuple, blocks)), tuple(caps))
        if kind == "graphic":
            edges = _need(d, "edges", where)
            if not isinstance(edges, list):
                raise InputError(f"{where}.edges: expected a list")
            pairs = [tuple(_int_list(e, f"{where}.edges[{i}]")) for i, e in enumerate(edges)]
            if any(len(p) != 2 for p in pairs):
                raise InputError(f"{where}.edges: each entry must be [a, b]")
            if len(pairs) != n:
                raise InputError(f"{where}.edges: need one auxiliary edge per vertex ({n}), got {len(pairs)}")
            aux = _int(d.get("aux_vertex_count", -1), f"{where}.aux_vertex_count")
            return GraphicMatroid(tuple(pairs), aux)
        if kind == "explicit":
            sets = _need(d, "independent_sets", where)
            if not isinstance(sets, list):
                raise InputError(f"{where}.independent_sets: expected a list")
            family = frozenset(to_mask(_int_list(s, f"{where}.independent_sets[{i}]"), n)
                               for i, s in enumerate(sets))
            return ExplicitMatroid(n, family)
    except InputError as exc:
        msg = str(exc)
        raise InputError(msg if msg.startswith(where) else f"{where}: {msg}") from None
    raise InputError(f"{where}.type: unknown matroid type {kind!r}")


def strategy_from_list(items, n: int, leader: Matroid | None, where: str = "strategy") -> InterdictionStrategy:
    if not isinstance(items, list) or not items:
        raise InputError(f"{where}: expected a nonempty list")
    pairs = []
    for i, it in enumerate(items):
        p = _num(_need(it, "probability", f"{where}[{i}]"), f"{where}[{i}].probability")
        s = _int_list(_need(it, "set", f"{where}[{i}]"), f"{where}[{i}].set")
        pairs.append((p, s))
    try:
        return InterdictionStrategy.from_pairs(pairs, n, leader=leader)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def strategy_to_list(pi: InterdictionStrategy) -> list[dict]:
    return [{"probability": real(p), "set": sorted(s)} for p, s in pi.support]


def canonical_digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def instance_from_dict(d: dict) -> Instance:
    if not isinstance(d, dict):
        raise InputError("instance: expected a JSON object")
    g = graph_from_dict(_need(d, "graph", "instance"))
    n = g.vertex_count
    ml = matroid_from_dict(_need(d, "leader", "instance"), n, "leader")
    mf = matroid_from_dict(_need(d, "follower", "instance"), n, "follower")
    pi = strategy_from_list(d["strategy"], n, ml) if "strategy" in d else None
    q = None
    if "marginals" in d:
        raw = d["marginals"]
        if not isinstance(raw, list) or len(raw) != n:
            raise InputError(f"marginals: expected a list of {n} numbers")
        q = np.array([_num(x, f"marginals[{i}]") for i, x in enumerate(raw)])
    return Instance(g, ml, mf, pi, q, canonical_digest(d))


def load_instance(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    return instance_from_dict(data)


def instance_to_dict(g: WeightedGraph, ml: Matroid, mf: Matroid,
                     pi: InterdictionStrategy | None = None) -> dict:
    d = {"graph": {"vertex_count": g.vertex_count,
                   "edges": [[u, v, real(w)] for u, v, w in g.edges]},
         "leader": ml.to_dict(), "follower": mf.to_dict()}
    if pi is not None:
        d["strategy"] = strategy_to_list(pi)
    return d


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
