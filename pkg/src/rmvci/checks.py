"""Randomized invariant battery run by the ``check`` command.

Every suite draws fresh random inputs from a single seeded generator, so a
given ``(instance, trials, seed)`` triple always yields the same report.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Matroid, WeightedGraph, coverage_weight, to_mask
from .errors import RmvciError
from .follower import eval_F, eval_L
from .generators import (random_independent_set, random_integral_point, random_polytope_point,
                         random_strategy, rng_from)
from .leader import _vertex_marginals, caratheodory_decompose, eval_Ltilde
from .strategy import (EffectiveWeights, InterdictionStrategy, marginals_of, pair_coeff_violations,
                       payoff_closed_form, strategy_weights)

SUITES = ("pair_coeff_sign", "F_vs_L", "F_equals_L_integral", "Ltilde_sandwich",
          "payoff_agreement", "decomposition_roundtrip")


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    failures: int = 0
    worst: float = float("inf")
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, slack: float, example) -> None:
        """``slack < 0`` is a violation; ``example`` is built lazily on the first one."""
        self.trials += 1
        self.worst = min(self.worst, slack)
        if slack < 0:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = example()


@dataclass
class CheckReport:
    suites: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites.values())


def corrupt_weights(g: WeightedGraph, ew: EffectiveWeights) -> EffectiveWeights:
    """Test hook: inflate ``w^{uv}`` past ``w^u + w^v`` on every positive-weight edge."""
    bump = np.where(g.weights > 0, 0.5 * g.weights + 1e-3, 0.0)
    return EffectiveWeights(ew.wu, ew.wv, ew.wu + ew.wv + bump)


def _vec(x) -> list:
    return [round(float(v), 12) for v in x]


def _strategy(pi: InterdictionStrategy) -> list:
    return [[round(p, 12), sorted(s)] for p, s in pi.support]


def run_checks(g: WeightedGraph, ml: Matroid, mf: Matroid, trials: int = 1000, seed: int = 0,
               corrupt: bool = False) -> CheckReport:
    rng = rng_from(seed)
    res = {name: SuiteResult(name) for name in SUITES}
    n = g.vertex_count
    for t in range(trials):
        pi = random_strategy(rng, g, ml)
        ew = strategy_weights(g, pi)
        if corrupt:
            ew = corrupt_weights(g, ew)
        q = marginals_of(g, pi).q

        bad = pair_coeff_violations(ew, g)
        res["pair_coeff_sign"].record(-1.0 if bad else 0.0,
                                   lambda: {"trial": t, "strategy": _strategy(pi), "edges": bad[:10]})

        x = random_polytope_point(rng, mf)
        L, F = eval_L(g, ew, x), eval_F(g, ew, x)
        res["F_vs_L"].record(F - 0.75 * L + 1e-9,
                             lambda: {"trial": t, "strategy": _strategy(pi), "x": _vec(x), "F": F, "L": L})
        xi = random_integral_point(rng, mf)
        Li, Fi = eval_L(g, ew, xi), eval_F(g, ew, xi)
        res["F_equals_L_integral"].record(1e-12 - abs(Fi - Li),
                                          lambda: {"trial": t, "x": _vec(xi), "F": Fi, "L": Li})

        Lt = eval_Ltilde(g, q, x)
        res["Ltilde_sandwich"].record(min(L - 0.5 * Lt + 1e-9, Lt - L + 1e-9),
                                      lambda: {"trial": t, "strategy": _strategy(pi), "x": _vec(x),
                                               "L": L, "Ltilde": Lt})

        s = random_independent_set(rng, mf)
        mask = to_mask(s)
        direct = sum(p * coverage_weight(g, mask & ~to_mask(S)) for p, S in pi.support)
        closed = payoff_closed_form(g, ew, mask)
        tol = 1e-9 * max(1.0, g.total_weight)
        res["payoff_agreement"].record(tol - abs(direct - closed),
                                       lambda: {"trial": t, "strategy": _strategy(pi), "set": sorted(s),
                                                "direct": direct, "closed_form": closed})

        qd = random_polytope_point(rng, ml)
        try:
            dec = caratheodory_decompose(ml, qd)
            err = float(np.max(np.abs(_vertex_marginals(dec, n) - qd), initial=0.0))
            ok = len(dec) <= n + 1 and dec.is_feasible_for(ml)
            slack = 1e-7 - err if ok else -1.0
        except RmvciError as exc:
            slack, err = -1.0, str(exc)
        res["decomposition_roundtrip"].record(slack, lambda: {"trial": t, "q": _vec(qd), "error": err})
    return CheckReport(res)
