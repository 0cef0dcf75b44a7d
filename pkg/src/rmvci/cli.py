"""Command-line front end.

Every subcommand writes a JSON report to stdout (or ``--out``). Exit codes:
0 success, 1 invariant failure, 2 input error, 3 nonconvergence,
4 capacity exceeded.
"""
from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import io
from .checks import run_checks
from .errors import (CapacityError, DecompositionError, InputError, NonConvergenceError,
                     StructuralError)
from .follower import approx_follower
from .leader import EXACT_LIMIT, caratheodory_decompose, solve_rmvci
from .lp import SEPARATION_TOL
from .oracle import (count_independent_sets, exact_rmvci_matrix_game, gap_formula, gap_instance,
                     solve_follower_ilp_bruteforce)
from .strategy import InterdictionStrategy, marginals_of

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_NONCONVERGENCE, EXIT_CAPACITY = 0, 1, 2, 3, 4


class Timer:
    def __init__(self):
        self.stages = {}

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.stages[name] = round(time.perf_counter() - t0, 6)


def _header(args, inst=None) -> dict:
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "inject_corrupt_weights")}
    rep = {"command": args.command, "args": echo}
    if inst is not None:
        rep["instance_digest"] = inst.digest
    return rep


def _ratio(num: float, den: float):
    if den > 1e-12:
        return io.real(num / den)
    return 1.0 if num <= 1e-9 else None


def cmd_solve(args, timer: Timer, report: dict) -> int:
    inst = io.load_instance(args.instance)
    report.update(_header(args, inst))
    method = "uniform-dual" if args.uniform_dual else "cutting-plane"
    extra = {} if args.tol is None else {"tol": args.tol}
    with timer.stage("solve"):
        cert = solve_rmvci(inst.graph, inst.leader, inst.follower, method=method, **extra)
    report.update({
        "method": cert.method,
        "surrogate_value": io.real(cert.surrogate_value),
        "lower_bound": io.real(cert.lower_bound),
        "theta": {"achieved": io.real(cert.theta_achieved), "upper": io.real(cert.theta_upper),
                  "exact": cert.theta_exact},
        "guaranteed_ratio": io.real(cert.guaranteed_ratio),
        "attack_set": sorted(cert.attack_set),
        "marginals": io.reals(cert.q_prime),
        "strategy": io.strategy_to_list(cert.pi_prime),
    })
    return EXIT_OK


def cmd_follower(args, timer: Timer, report: dict) -> int:
    inst = io.load_instance(args.instance)
    report.update(_header(args, inst))
    if inst.strategy is None:
        raise InputError("strategy: missing (the follower command needs an explicit leader strategy)")
    g, pi, mf = inst.graph, inst.strategy, inst.follower
    tol = args.tol if args.tol is not None else SEPARATION_TOL
    with timer.stage("approx"):
        sol = approx_follower(g, pi, mf, tol)
    report.update({
        "lp_value": io.real(sol.lp_value),
        "rounded_value": io.real(sol.ilp_value),
        "attack_set": sorted(sol.attack_set),
        "lp_point": io.reals(sol.lp_point),
        "ratio_bound": None if not np.isfinite(sol.ratio_bound) else io.real(sol.ratio_bound),
        "pipage_steps": len(sol.rounding.steps) - 1,
    })
    if count_independent_sets(mf, EXACT_LIMIT) is not None:
        with timer.stage("exact"):
            best, value = solve_follower_ilp_bruteforce(g, pi, mf)
        report["exact"] = {"value": io.real(value), "attack_set": sorted(best),
                           "exact_over_rounded": _ratio(value, sol.ilp_value)}
    else:
        report["exact"] = None
    return EXIT_OK


def cmd_gap_study(args, timer: Timer, report: dict) -> int:
    report.update(_header(args))
    if args.n_max % 2 or not 4 <= args.n_max <= 64:
        raise InputError(f"--n-max: need an even value in [4, 64], got {args.n_max}")
    if args.step <= 0 or args.step % 2:
        raise InputError(f"--step: need a positive even value, got {args.step}")
    rows = []
    for n in range(4, args.n_max + 1, args.step):
        g, mf = gap_instance(n)
        with timer.stage(f"n={n}"):
            sol = approx_follower(g, InterdictionStrategy.null(n), mf)
        lp, ilp, ratio = gap_formula(n)
        rows.append({"n": n, "lp": io.real(sol.lp_value), "ilp": io.real(sol.ilp_value),
                     "ratio": _ratio(sol.lp_value, sol.ilp_value),
                     "formula_lp": lp, "formula_ilp": ilp, "formula_ratio": io.real(float(ratio)),
                     "limit": io.real(4 / 3)})
    report["rows"] = rows
    ratios = [r["ratio"] for r in rows]
    report["monotone"] = all(a < b for a, b in zip(ratios, ratios[1:]))
    return EXIT_OK


def cmd_check(args, timer: Timer, report: dict) -> int:
    inst = io.load_instance(args.instance)
    report.update(_header(args, inst))
    if args.trials < 1:
        raise InputError("--trials: must be positive")
    with timer.stage("check"):
        res = run_checks(inst.graph, inst.leader, inst.follower, args.trials, args.seed,
                         corrupt=args.inject_corrupt_weights)
    report["suites"] = {name: {"pass": s.passed, "trials": s.trials, "failures": s.failures,
                               "min_slack": io.real(s.worst) if s.trials else None, "counterexample": s.counterexample}
                        for name, s in res.suites.items()}
    report["pass"] = res.passed
    return EXIT_OK if res.passed else EXIT_INVARIANT


def cmd_decompose(args, timer: Timer, report: dict) -> int:
    inst = io.load_instance(args.instance)
    report.update(_header(args, inst))
    if args.marginals is not None:
        try:
            q = np.array([float(v) for v in args.marginals.split(",")])
        except ValueError:
            raise InputError("--marginals: expected comma-separated numbers") from None
    elif inst.marginals is not None:
        q = inst.marginals
    else:
        raise InputError("marginals: missing (give them in the instance or with --marginals)")
    if q.shape != (inst.graph.vertex_count,):
        raise InputError(f"marginals: expected {inst.graph.vertex_count} values, got {q.size}")
    with timer.stage("decompose"):
        pi = caratheodory_decompose(inst.leader, q)
    back = marginals_of(inst.graph, pi).q
    report.update({"strategy": io.strategy_to_list(pi), "support_size": len(pi),
                   "max_marginal_error": io.real(np.max(np.abs(back - q), initial=0.0))})
    return EXIT_OK


def cmd_exact(args, timer: Timer, report: dict) -> int:
    inst = io.load_instance(args.instance)
    report.update(_header(args, inst))
    with timer.stage("matrix_game"):
        pi, theta = exact_rmvci_matrix_game(inst.graph, inst.leader, inst.follower)
    report.update({"theta_star": io.real(theta), "strategy": io.strategy_to_list(pi),
                   "marginals": io.reals(marginals_of(inst.graph, pi).q)})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")
    common.add_argument("--tol", type=float, default=None,
                        help=f"separation violation threshold (default {SEPARATION_TOL:g})")

    p = argparse.ArgumentParser(prog="rmvci", description="Randomized max-vertex-cover interdiction "
                                "under matroid constraints.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="8/3-approximate leader strategy with certificate")
    s.add_argument("instance")
    s.add_argument("--uniform-dual", action="store_true",
                   help="solve the compact LP (both matroids must be uniform)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("follower", parents=[common], help="4/3-approximate best response to a given strategy")
    s.add_argument("instance")
    s.set_defaults(func=cmd_follower)

    s = sub.add_parser("gap-study", parents=[common], help="LP/ILP gap on complete graphs")
    s.add_argument("--n-max", type=int, default=20)
    s.add_argument("--step", type=int, default=2)
    s.set_defaults(func=cmd_gap_study)

    s = sub.add_parser("check", parents=[common], help="randomized invariant battery")
    s.add_argument("instance")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--inject-corrupt-weights", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("decompose", parents=[common], help="split leader marginals into independent sets")
    s.add_argument("instance")
    s.add_argument("--marginals", help="comma-separated q, overriding the instance field")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("exact", parents=[common], help="optimal strategy via the matrix-game LP (small n)")
    s.add_argument("instance")
    s.set_defaults(func=cmd_exact)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if not 0 <= getattr(args, "seed", 0) < 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INPUT
    timer = Timer()
    report: dict = {"command": args.command}
    try:
        code = args.func(args, timer, report)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        report["error"] = {"kind": "nonconvergence", "message": str(exc), "iterations": exc.iterations,
                           "last_iterate": None if exc.last_iterate is None else io.reals(exc.last_iterate)}
        code = EXIT_NONCONVERGENCE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (StructuralError, DecompositionError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        report["error"] = {"kind": "invariant", "message": str(exc)}
        code = EXIT_INVARIANT
    if args.timings:
        report["timings"] = timer.stages
    text = io.dumps(report)
    if args.out:
        io.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
