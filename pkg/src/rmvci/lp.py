"""Dense simplex solver, matroid-polytope separation and a cutting-plane driver.

The simplex works on a full dense tableau. Pricing is Dantzig's rule, with
Bland's smallest-index rule taking over on degenerate stretches so the
method cannot cycle. Problem sizes here are a few hundred rows at most.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import Matroid, PartitionMatroid, UniformMatroid, iter_bits, subset_sums
from .errors import CapacityError, InputError, NonConvergenceError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
SEPARATION_TOL = 1e-9
MAX_ENUM_SUPPORT = 24

_RELATIONS = ("<=", ">=", "=")


@dataclass(frozen=True)
class LinearProgram:
    """``sense c.x`` subject to ``A[i].x rel[i] b[i]`` and ``lo <= x <= hi``."""

    c: np.ndarray
    A: np.ndarray
    rel: tuple
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    sense: str = "max"
    # original Fraction data (c, A, b, lo, hi) when built from rationals;
    # only the exact reference solver reads it
    exact: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        A = np.asarray(self.A, dtype=float).reshape(-1, n)
        b = np.asarray(self.b, dtype=float).ravel()
        rel = tuple(self.rel)
        lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (n,)).copy()
        hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (n,)).copy()
        if A.shape[0] != b.size or len(rel) != b.size:
            raise InputError("constraint matrix, relations and rhs have inconsistent lengths")
        if any(r not in _RELATIONS for r in rel):
            raise InputError(f"relations must be among {_RELATIONS}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InputError("LP coefficients must be finite")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise InputError("invalid variable bounds")
        if self.sense not in ("max", "min"):
            raise InputError("sense must be 'max' or 'min'")
        for name, val in (("c", c), ("A", A), ("b", b), ("lo", lo), ("hi", hi)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "rel", rel)

    @classmethod
    def build(cls, c, constraints=(), bounds=None, sense="max") -> "LinearProgram":
        """Build from a list of ``(coefficients, relation, rhs)`` triples.

        ``bounds`` is a per-variable list of ``(lo, hi)``; ``None`` entries mean
        infinite. Default bounds are ``[0, inf)``.
        """
        constraints = list(constraints)
        exact = None
        if _has_fraction(c, constraints, bounds):
            exact = _exact_data(c, constraints, bounds)
        c = np.asarray(c, dtype=float)
        n = c.size
        rows = [np.asarray(a, dtype=float) for a, _, _ in constraints]
        A = np.vstack(rows) if rows else np.zeros((0, n))
        rel = tuple(r for _, r, _ in constraints)
        b = np.array([float(r) for _, _, r in constraints])
        if bounds is None:
            lo, hi = np.zeros(n), np.full(n, np.inf)
        else:
            lo = np.array([-np.inf if l is None else float(l) for l, _ in bounds])
            hi = np.array([np.inf if h is None else float(h) for _, h in bounds])
        return cls(c, A, rel, b, lo, hi, sense, exact)

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def constraints(self) -> list:
        return [(self.A[i], self.rel[i], float(self.b[i])) for i in range(self.b.size)]

    def with_constraints(self, A_extra, rel_extra, b_extra) -> "LinearProgram":
        A_extra = np.asarray(A_extra, dtype=float).reshape(-1, self.num_vars)
        return LinearProgram(self.c, np.vstack([self.A, A_extra]), self.rel + tuple(rel_extra),
                             np.concatenate([self.b, np.asarray(b_extra, dtype=float)]),
                             self.lo, self.hi, self.sense)

    def violation(self, x) -> float:
        """Largest absolute violation of constraints and bounds at ``x``."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.b.size:
            lhs = self.A @ x
            for r, code in enumerate(self.rel):
                d = lhs[r] - self.b[r]
                worst = max(worst, d if code == "<=" else -d if code == ">=" else abs(d))
        worst = max(worst, float(np.max(self.lo - x, initial=0.0)), float(np.max(x - self.hi, initial=0.0)))
        return worst


def _has_fraction(c, constraints, bounds) -> bool:
    vals = list(c) + [v for a, _, r in constraints for v in list(a) + [r]]
    vals += [v for pair in (bounds or ()) for v in pair]
    return any(isinstance(v, Fraction) for v in vals)


def _exact_data(c, constraints, bounds):
    def q(v):
        return Fraction(v)

    n = len(c)
    bounds = bounds or [(0, None)] * n
    lo = tuple(None if l is None or l == -np.inf else q(l) for l, _ in bounds)
    hi = tuple(None if h is None or h == np.inf else q(h) for _, h in bounds)
    return (tuple(map(q, c)), tuple(tuple(map(q, a)) for a, _, _ in constraints),
            tuple(q(r) for _, _, r in constraints), lo, hi)


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0
    cuts: tuple = ()
    rounds: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True)
class Cut:
    """Valid inequality ``a . x <= b``."""

    a: np.ndarray
    b: float

    def violation(self, x) -> float:
        return float(np.dot(self.a, x) - self.b)

    def key(self) -> tuple:
        return tuple(self.a.tolist()) + (self.b,)


# ---------------------------------------------------------------------------
# simplex

def _standard_form(p: LinearProgram):
    """Rewrite as ``max c'y, A'y (rel) b', y >= 0`` plus ``x = offset + T y``."""
    n = p.num_vars
    cols = []
    offset = np.zeros(n)
    extra_rows = []
    for j in range(n):
        lo, hi = p.lo[j], p.hi[j]
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lo):
            offset[j] = lo
            cols.append(e)
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    T = np.array(cols).T if cols else np.zeros((n, 0))
    N = T.shape[1]
    A = p.A @ T
    b = p.b - p.A @ offset
    rel = list(p.rel)
    if extra_rows:
        ub = np.zeros((len(extra_rows), N))
        for r, (col, val) in enumerate(extra_rows):
            ub[r, col] = 1.0
        A = np.vstack([A, ub])
        b = np.concatenate([b, [val for _, val in extra_rows]])
        rel += ["<="] * len(extra_rows)
    sign = 1.0 if p.sense == "max" else -1.0
    c = sign * (p.c @ T)
    return A, np.asarray(b, dtype=float), rel, c, T, offset, sign


def _pivot(tab: np.ndarray, r: int, j: int):
    tab[r] /= tab[r, j]
    col = tab[:, j].copy()
    col[r] = 0.0
    nz = np.nonzero(col)[0]
    if nz.size:
        tab[nz] -= np.outer(col[nz], tab[r])


def _run_simplex(tab, basis, allowed, tol, max_iter, rhs, stall_limit=25):
    """Maximize with the objective row last; returns (status, iterations).

    ``rhs`` is the column used in ratio tests. Dantzig pricing while the
    objective moves; after ``stall_limit`` consecutive degenerate pivots it
    switches to Bland's smallest-index rule until the objective strictly
    improves again, which rules out cycling.
    """
    m = tab.shape[0] - 1
    it = 0
    stalled = 0
    while True:
        d = tab[-1, :allowed.size]
        cand = np.nonzero((d < -tol) & allowed)[0]
        if cand.size == 0:
            return "optimal", it
        j = int(cand[0]) if stalled >= stall_limit else int(cand[np.argmin(d[cand])])
        colj = tab[:m, j]
        rows = np.nonzero(colj > tol)[0]
        if rows.size == 0:
            return "unbounded", it
        ratios = tab[rows, rhs] / colj[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        before = tab[-1, rhs]
        _pivot(tab, r, j)
        basis[r] = j
        stalled = stalled + 1 if abs(tab[-1, rhs] - before) <= 1e-12 * max(1.0, abs(before)) else 0
        it += 1
        if it > max_iter:
            raise NonConvergenceError("simplex iteration limit reached", iterations=it)


def _tableau(A, b, rel):
    """Slack/surplus/artificial columns; returns (matrix, basis, artificial mask, art rows)."""
    m, N = A.shape
    n_slack = sum(r != "=" for r in rel)
    n_art = sum(r != "<=" for r in rel)
    width = N + n_slack + n_art
    M = np.zeros((m, width))
    M[:, :N] = A
    basis = [0] * m
    s, a = N, N + n_slack
    art_rows = []
    for i, r in enumerate(rel):
        if r != "=":
            M[i, s] = 1.0 if r == "<=" else -1.0
            if r == "<=":
                basis[i] = s
            s += 1
        if r != "<=":
            M[i, a] = 1.0
            basis[i] = a
            art_rows.append(i)
            a += 1
    is_art = np.zeros(width, dtype=bool)
    is_art[N + n_slack:] = True
    return M, basis, is_art, art_rows


def _solve_standard(A, b, rel, c, tol, max_iter, perturb):
    """Two-phase simplex on ``max c.y, A y (rel) b, y >= 0`` with ``b >= 0``.

    With ``perturb`` the ratio tests run on a slightly inflated right-hand
    side (breaking degenerate ties); the true right-hand side is carried in
    a second column and must come out nonnegative for the result to stand.
    Returns ``(status, y, iterations)``; ``status`` may be ``"retry"``.
    """
    m, N = A.shape
    M, basis, is_art, art_rows = _tableau(A, b, rel)
    width = M.shape[1]
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    bp = b.copy()
    if perturb:
        rng = np.random.default_rng(12345)
        bp = b + scale * 1e-9 * (1.0 + rng.random(m))
    tab = np.zeros((m + 1, width + 2))
    tab[:m, :width] = M
    tab[:m, width] = bp
    tab[:m, width + 1] = b
    RP, RO = width, width + 1

    iters = 0
    keep = list(range(m))
    if art_rows:
        for i in art_rows:
            tab[-1] -= tab[i]
        tab[-1, is_art.nonzero()[0]] = 0.0
        _, k = _run_simplex(tab, basis, np.ones(width, dtype=bool), tol, max_iter, RP)
        iters += k
        if -tab[-1, RO] > FEAS_TOL * scale and -tab[-1, RP] > FEAS_TOL * scale:
            return "infeasible", None, iters
        keep = []
        for i in range(m):
            if is_art[basis[i]]:
                nz = np.nonzero((np.abs(tab[i, :width]) > tol) & ~is_art)[0]
                if nz.size:
                    _pivot(tab, i, int(nz[0]))
                    basis[i] = int(nz[0])
                    keep.append(i)
            else:
                keep.append(i)
        tab = np.vstack([tab[keep], tab[-1:]])
        basis = [basis[i] for i in keep]
        m = len(keep)

    c_full = np.zeros(width)
    c_full[:N] = c
    tab[-1] = 0.0
    tab[-1, :width] = -c_full
    for i, j in enumerate(basis):
        if c_full[j] != 0.0:
            tab[-1] += c_full[j] * tab[i]
    status, k = _run_simplex(tab, basis, ~is_art, tol, max_iter, RP)
    iters += k
    if status == "unbounded":
        return "unbounded", None, iters

    # re-derive the basic solution from the original data to shed pivot drift
    y_all = np.zeros(width)
    y_all[basis] = tab[:m, RO]
    if m:
        B = M[np.ix_(keep, basis)]
        try:
            refined = np.linalg.solve(B, b[keep])
            if np.all(np.isfinite(refined)):
                y_all[basis] = refined
        except np.linalg.LinAlgError:
            pass
    if perturb and y_all.min(initial=0.0) < -FEAS_TOL * scale:
        return "retry", None, iters
    return "optimal", np.maximum(y_all[:N], 0.0), iters


def solve_lp(p: LinearProgram, tol: float = PIVOT_TOL, max_iter: int = 200_000) -> LpSolution:
    """Two-phase dense tableau simplex, Bland's rule as the anti-cycling fallback.

    Infeasibility and unboundedness are reported through ``status``.
    """
    A, b, rel, c, T, offset, _ = _standard_form(p)
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    rel = [{"<=": ">=", ">=": "<="}.get(r, r) if flip else r for r, flip in zip(rel, neg)]
    status, y, iters = _solve_standard(A, b, rel, c, tol, max_iter, perturb=True)
    if status == "retry":
        status, y, more = _solve_standard(A, b, rel, c, tol, max_iter, perturb=False)
        iters += more
    if status != "optimal":
        return LpSolution(status, iterations=iters)
    x = offset + T @ y
    return LpSolution("optimal", x, float(p.c @ x), iterations=iters)


# ---------------------------------------------------------------------------
# matroid polytope separation

def _uniform_best(values: np.ndarray, idx: np.ndarray, cap: int):
    """Best ``x(S) - min(|S|, cap)`` over ``S`` within ``idx``; returns (violation, members)."""
    if idx.size == 0:
        return 0.0, idx
    order = idx[np.lexsort((idx, -values[idx]))]
    prefix = np.cumsum(values[order])
    sizes = np.arange(1, order.size + 1)
    gain = prefix - np.minimum(sizes, cap)
    j = int(np.argmax(gain))
    return float(gain[j]), order[: j + 1]


def rank_cut(n: int, members, rhs: float) -> Cut:
    a = np.zeros(n)
    a[list(members)] = 1.0
    return Cut(a, float(rhs))


def separate_matroid_polytope(m: Matroid, point, tol: float = SEPARATION_TOL) -> Cut | None:
    """Return a violated inequality of the matroid polytope, or ``None`` if ``point`` is inside.

    Uniform and partition matroids use closed forms; other variants enumerate
    subsets of the point's support.
    """
    x = np.asarray(point, dtype=float)
    n = m.ground_size
    if x.shape != (n,):
        raise InputError(f"point has shape {x.shape}, expected ({n},)")
    if not np.all(np.isfinite(x)):
        raise InputError("point must be finite")
    i = int(np.argmin(x)) if n else 0
    if n and x[i] < -tol:
        a = np.zeros(n)
        a[i] = -1.0
        return Cut(a, 0.0)
    if isinstance(m, UniformMatroid):
        viol, members = _uniform_best(x, np.arange(n), m.k)
        return rank_cut(n, members, m.rank(members.tolist())) if viol > tol else None
    if isinstance(m, PartitionMatroid):
        members = []
        total = 0.0
        for blk, cap in zip(m.blocks, m.caps):
            viol, mem = _uniform_best(x, np.array(blk, dtype=np.int64), cap)
            if viol > 0:
                total += viol
                members.extend(mem.tolist())
        return rank_cut(n, members, m.rank(members)) if total > tol else None
    support = [int(j) for j in np.nonzero(x > 0)[0]]
    if len(support) > MAX_ENUM_SUPPORT:
        raise CapacityError(f"support of size {len(support)} exceeds enumeration limit {MAX_ENUM_SUPPORT}")
    gains = subset_sums(x[support]) - m.subset_ranks(support)
    best = int(np.argmax(gains))
    if gains[best] <= tol:
        return None
    members = [support[b] for b in iter_bits(best)]
    return rank_cut(n, members, m.rank(members))


# ---------------------------------------------------------------------------
# cutting planes

Separator = Callable[[np.ndarray], "Cut | Sequence[Cut] | None"]


def cutting_plane_maximize(base: LinearProgram, separate: Separator, max_iterations: int = 1000,
                           tol: float = SEPARATION_TOL) -> LpSolution:
    """Solve ``base`` plus every inequality the separation oracle can produce.

    Repeats: solve the working LP, ask ``separate`` for violated cuts at the
    optimum, append the new ones. Stops when nothing violated by more than
    ``tol`` comes back. Hitting ``max_iterations`` raises
    :class:`NonConvergenceError` carrying the last iterate.
    """
    lp = base
    seen: set = set()
    cuts: list[Cut] = []
    pivots = 0
    for rnd in range(1, max_iterations + 1):
        sol = solve_lp(lp)
        pivots += sol.iterations
        if not sol.optimal:
            return LpSolution(sol.status, iterations=pivots, cuts=tuple(cuts), rounds=rnd)
        found = separate(sol.x)
        if found is None:
            found = []
        elif isinstance(found, Cut):
            found = [found]
        fresh = []
        for cut in found:
            if cut.violation(sol.x) <= tol:
                continue
            k = cut.key()
            if k in seen:
                continue
            seen.add(k)
            fresh.append(cut)
        if not fresh:
            return LpSolution("optimal", sol.x, sol.objective, iterations=pivots,
                              cuts=tuple(cuts), rounds=rnd)
        cuts.extend(fresh)
        lp = lp.with_constraints([c.a for c in fresh], ["<="] * len(fresh), [c.b for c in fresh])
    raise NonConvergenceError(f"no convergence after {max_iterations} cutting-plane rounds",
                              last_iterate=sol.x, iterations=max_iterations)
