"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 infeasible regime, 4 oracle
disagreement.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import resolve_response_rate
from .estimators import DEFAULT_CONFIDENCE, error_budget, stratified_budget
from .exceptions import InfeasibleShiftBound, PollError, ValidationError
from .oracle import (
    DEFAULT_GRID,
    DEFAULT_REPLICATIONS,
    AffineEstimator,
    exact_estimator_mse,
    grid_max_mse,
    minimax_offset_scan,
    monte_carlo_mse,
    stratified_grid_max_mse,
)
from .pollfile import load_poll_spec
from .report import emit_report, tme_sweep

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_ORACLE = 4

GRID_TOLERANCE = 1e-4
MC_SIGMAS = 3.0


def _positive(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _diagnose(spec):
    design = spec.design
    rate = resolve_response_rate(design)
    print(f"response rate {rate!r} ({design.rate_source})", file=sys.stderr)


def cmd_report(args):
    spec = load_poll_spec(args.spec)
    _diagnose(spec)
    if spec.strata is not None:
        budget = stratified_budget(spec.strata, args.multiplier, args.confidence)
    else:
        budget = error_budget(spec.design, spec.tally, spec.regime, args.multiplier, args.confidence)
    _write(emit_report(budget, args.format, design=spec.design, tally=spec.tally,
                       regime=spec.regime, strata=spec.strata,
                       confidence_multiplier=args.confidence), args.out)
    return EXIT_OK


def cmd_sweep(args):
    spec = load_poll_spec(args.spec)
    if spec.tally is None:
        raise ValidationError("sweep needs a top-level tally", "tally")
    _diagnose(spec)
    table = tme_sweep(spec.design, spec.tally, args.delta_max, args.steps, args.multiplier,
                      args.confidence)
    _write(emit_report(table, args.format), args.out)
    return EXIT_OK


def _line(ok, name, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def _check_unstratified(spec, args):
    design, regime = spec.design, spec.regime
    rate = resolve_response_rate(design)
    n = design.respondents
    budget = error_budget(design, spec.tally, regime)
    est = AffineEstimator.midpoint(rate, regime)
    grid = grid_max_mse(regime, est, n, rate, args.grid)
    ok = []
    gap = budget.max_mse - grid.max_mse
    ok.append(_line(-1e-12 <= gap < GRID_TOLERANCE, "grid max MSE",
                    f"closed {budget.max_mse:.10g}, grid {grid.max_mse:.10g}, gap {gap:.3g}"))
    ok.append(_line(abs(grid.variance - budget.max_variance) < GRID_TOLERANCE, "max variance",
                    f"closed {budget.max_variance:.6g}, grid argmax {grid.variance:.6g}"))
    ok.append(_line(abs(grid.squared_bias - budget.max_squared_bias) < GRID_TOLERANCE,
                    "max squared bias",
                    f"closed {budget.max_squared_bias:.6g}, grid argmax {grid.squared_bias:.6g}"))
    scan = minimax_offset_scan(regime, n, rate, args.offsets)
    ok.append(_line(scan.within_one_step, "minimax offset",
                    f"best {scan.best_offset:.6g}, midpoint {scan.midpoint_offset:.6g}, "
                    f"step {scan.step:.3g}"))
    exact = exact_estimator_mse(grid.argmax_state, est, n, rate)
    mc = monte_carlo_mse(grid.argmax_state, est, n, rate, args.reps, args.seed)
    z = abs(mc.mse_estimate - exact.mse) / mc.standard_error if mc.standard_error else 0.0
    ok.append(_line(z <= MC_SIGMAS if mc.standard_error else mc.mse_estimate == exact.mse,
                    "monte carlo",
                    f"exact {exact.mse:.8g}, simulated {mc.mse_estimate:.8g} "
                    f"+/- {mc.standard_error:.3g} ({z:.2f} SE)"))
    return all(ok)


def _check_stratified(spec, args):
    budget = stratified_budget(spec.strata)
    grid = stratified_grid_max_mse(spec.strata, min(args.grid, 201))
    gap = budget.max_mse - grid.max_mse
    return _line(abs(gap) < GRID_TOLERANCE, "stratified grid max MSE",
                 f"closed {budget.max_mse:.10g}, grid {grid.max_mse:.10g}, gap {gap:.3g}")


def cmd_oracle_check(args):
    spec = load_poll_spec(args.spec)
    _diagnose(spec)
    ok = True
    if spec.regime is not None and spec.tally is not None:
        ok = _check_unstratified(spec, args) and ok
    if spec.strata is not None:
        ok = _check_stratified(spec, args) and ok
    print("all checks passed" if ok else "oracle disagreement")
    return EXIT_OK if ok else EXIT_ORACLE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pollbounds",
        description="Midpoint estimates and total margin of error for polls with nonresponse.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec", help="poll spec JSON file")
        p.add_argument("--multiplier", type=_positive, default=1.0,
                       help="scale applied to the root max MSE (default 1)")
        p.add_argument("--confidence", type=_positive, default=DEFAULT_CONFIDENCE,
                       help="multiplier for the margin of sampling error (default 1.96)")
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("report", help="error budget for one poll")
    common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="TME over symmetric shift bounds")
    common(p)
    p.add_argument("--delta-max", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="verify closed forms by brute force")
    p.add_argument("spec", help="poll spec JSON file")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--offsets", type=int, default=201)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=DEFAULT_REPLICATIONS)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleShiftBound as exc:
        print(f"error: infeasible regime: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PollError, OSError) as exc:
        field = getattr(exc, "field", None)
        prefix = f"error [{field}]" if field else "error"
        print(f"{prefix}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
