"""seqctl command line: validate, solve, evaluate, simulate, calibrate,
structure, oracle (dev), serve.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 solver
failure. ``--json`` switches every report to canonical JSON.
"""

from __future__ import annotations

import argparse
import os
import sys

from .calibrate import CalibrationTarget, calibrate
from .cost import CostSpec
from .errors import (CalibrationStallError, HorizonLimitError, InfeasibleTargetError,
                     InvalidModelError, NoConvergenceError, NoObservationOptimalError,
                     SeqctlError, StateExplosionError, TooLargeError,
                     UnconvergedPolicyError, UnknownIdError)
from .limit import (GridConfig, LimitPolicyStrategy, classify_region,
                    iterate_to_fixpoint)
from .model import load_model, validate_model
from .oracle import enumerate_optimal
from .problem import TestingProblem
from .ratio import parse_rational
from .reporting import canonical_dumps
from .strategy import ConstantControlSPRT, evaluate_exact, simulate
from .truncated import extract_truncated_strategy, solve_truncated

USAGE_EXIT = 1
VALIDATION_EXIT = 2
SOLVER_EXIT = 3

_VALIDATION_ERRORS = (InvalidModelError, UnknownIdError, InfeasibleTargetError)
_SOLVER_ERRORS = (StateExplosionError, HorizonLimitError, NoConvergenceError,
                  UnconvergedPolicyError, CalibrationStallError, TooLargeError,
                  NoObservationOptimalError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _add_cost_flags(p: argparse.ArgumentParser):
    p.add_argument("--lambda0", required=True, help="type I error penalty (rational or decimal)")
    p.add_argument("--lambda1", required=True, help="type II error penalty")
    p.add_argument("--pi0", default="1", help="weight of the null-hypothesis sample number")
    p.add_argument("--pi1", default="0", help="weight of the alternative-hypothesis sample number")


def _add_grid_flags(p: argparse.ArgumentParser):
    p.add_argument("--grid-min", type=float, default=1e-6, help="smallest finite grid ratio")
    p.add_argument("--grid-max", type=float, default=1e6, help="largest finite grid ratio")
    p.add_argument("--grid-points", type=int, default=4001)
    p.add_argument("--tol", type=float, default=1e-9, help="sup-norm fixed-point tolerance")
    p.add_argument("--max-iter", type=int, default=10_000)


def _add_strategy_flags(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--horizon", type=int, help="use the optimal truncated strategy")
    g.add_argument("--limit", action="store_true", help="use the stationary fixed-point strategy")
    g.add_argument("--sprt", nargs=2, metavar=("LOWER", "UPPER"),
                   help="fixed-control SPRT with these ratio thresholds")
    g.add_argument("--strategy", metavar="REPORT",
                   help="reconstruct the strategy from a `seqctl solve --json` report file")
    p.add_argument("--sprt-control", help="control for --sprt (default: first control)")
    p.add_argument("--strategy-depth-cap", type=int, default=1000,
                   help="hard stop for the stationary strategy")


def build_parser() -> _Parser:
    parser = _Parser(prog="seqctl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a model file")
    p.add_argument("model")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("solve", help="solve for the optimal strategy")
    p.add_argument("model")
    _add_cost_flags(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--horizon", type=int, help="exact truncated solve at this horizon")
    g.add_argument("--limit", action="store_true", help="grid fixed-point solve")
    _add_grid_flags(p)
    p.add_argument("--policy-table", action="store_true", help="include the full table/grid")
    p.add_argument("--max-states", type=int, default=5_000_000)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("evaluate", help="exact operating characteristics of a strategy")
    p.add_argument("model")
    _add_cost_flags(p)
    _add_strategy_flags(p)
    _add_grid_flags(p)
    p.add_argument("--depth-cap", type=int, default=64)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simulate", help="Monte Carlo operating characteristics")
    p.add_argument("model")
    _add_cost_flags(p)
    _add_strategy_flags(p)
    _add_grid_flags(p)
    p.add_argument("--hypothesis", choices=["h0", "h1"], required=True)
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--depth-cap", type=int, default=64)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("calibrate", help="find multipliers hitting target error levels")
    p.add_argument("model")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tol-alpha", type=float, default=0.005)
    p.add_argument("--tol-beta", type=float, default=0.005)
    p.add_argument("--pi0", default="1")
    p.add_argument("--pi1", default="0")
    p.add_argument("--exact-depth", type=int, help="exact evaluation to this depth (default 64)")
    p.add_argument("--runs", type=int, help="Monte Carlo evaluation with this many runs")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--max-outer-iter", type=int, default=60)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("structure", help="classify the continuation region")
    p.add_argument("model")
    _add_cost_flags(p)
    _add_grid_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("oracle", help="(dev) brute-force optimum on a tiny instance")
    p.add_argument("model")
    _add_cost_flags(p)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the live session HTTP service")
    p.add_argument("model")
    _add_cost_flags(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--horizon", type=int, help="serve the truncated strategy")
    g.add_argument("--limit", action="store_true", default=True, help="serve the stationary strategy (default)")
    _add_grid_flags(p)
    p.add_argument("--strategy-depth-cap", type=int, default=1000)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cost_from(args) -> CostSpec:
    return CostSpec(parse_rational(args.lambda0), parse_rational(args.lambda1),
                    parse_rational(args.pi0), parse_rational(args.pi1))


def _grid_from(args) -> GridConfig:
    return GridConfig.from_bounds(args.grid_min, args.grid_max, args.grid_points,
                                  args.tol, args.max_iter)


def _emit(args, report: dict, human_lines: list[str]):
    if getattr(args, "json", False):
        sys.stdout.write(canonical_dumps(report))
    else:
        for line in human_lines:
            print(line)


def _limit_policy(problem: TestingProblem, args):
    policy = iterate_to_fixpoint(problem, _grid_from(args))
    if not policy.converged:
        raise NoConvergenceError(
            f"no convergence after {policy.iterations} sweeps "
            f"(residual {policy.residual:.3e} >= tol {policy.config.tol:.3e})")
    return policy


def _strategy_from(problem: TestingProblem, args):
    if getattr(args, "strategy", None):
        return _strategy_from_report(problem, args)
    if getattr(args, "horizon", None):
        solution = solve_truncated(problem, args.horizon)
        return extract_truncated_strategy(solution), {"solver": solution.to_json_dict()}
    if getattr(args, "sprt", None):
        control = args.sprt_control or problem.model.controls[0]
        problem.model.require_control(control)
        strat = ConstantControlSPRT(control, parse_rational(args.sprt[0]),
                                    parse_rational(args.sprt[1]))
        return strat, {"solver": None}
    policy = _limit_policy(problem, args)
    strat = LimitPolicyStrategy(policy, depth_cap=args.strategy_depth_cap)
    return strat, {"solver": policy.to_json_dict()}


def _strategy_from_report(problem: TestingProblem, args):
    """Rebuild a solved strategy from a `seqctl solve --json` report; the
    solve is deterministic, so re-running it reproduces the strategy."""
    with open(args.strategy, "r", encoding="utf-8") as fh:
        import json
        report = json.load(fh)
    mode = report.get("mode")
    if mode == "truncated":
        solution = solve_truncated(problem, int(report["horizon"]))
        return extract_truncated_strategy(solution), {"solver": solution.to_json_dict()}
    if mode == "limit":
        cfg = GridConfig(log10_zmin=float(report["log10_zmin"]),
                         log10_zmax=float(report["log10_zmax"]),
                         points=int(report["grid_points"]),
                         tol=float(report["tol"]))
        policy = iterate_to_fixpoint(problem, cfg)
        if not policy.converged:
            raise NoConvergenceError("limit solve from report settings did not converge")
        strat = LimitPolicyStrategy(policy, depth_cap=args.strategy_depth_cap)
        return strat, {"solver": policy.to_json_dict()}
    raise ValueError(f"strategy report {args.strategy!r} has unknown mode {mode!r}")


def _cmd_validate(args) -> int:
    report = validate_model(load_model(args.model))
    body = {"command": "validate", "file": args.model}
    body.update(report.to_json_dict())
    lines = [f"{'OK' if report.ok else 'INVALID'}: {args.model}"]
    lines += [f"  [{v.severity}] {v.code}: {v.message}" for v in report.violations]
    _emit(args, body, lines)
    return 0 if report.ok else VALIDATION_EXIT


def _cmd_solve(args) -> int:
    problem = TestingProblem(load_model(args.model), _cost_from(args))
    if args.horizon:
        solution = solve_truncated(problem, args.horizon, max_states=args.max_states)
        body = {"command": "solve", "file": args.model, "cost": problem.cost.to_json_dict()}
        body.update(solution.to_json_dict(include_table=args.policy_table))
        lines = [
            f"truncated solve, horizon {solution.horizon}",
            f"  value            {solution.value} (= {float(solution.value):.6g})",
            f"  take observation {solution.take_observation}",
            f"  first control    {solution.first_control}",
            f"  memo entries     {len(solution.table)}",
        ]
        _emit(args, body, lines)
        return 0
    policy = _limit_policy(problem, args)
    body = {"command": "solve", "file": args.model, "cost": problem.cost.to_json_dict()}
    body.update(policy.to_json_dict(include_grid=args.policy_table))
    lines = [
        f"limit solve, {policy.config.points} grid points",
        f"  converged   {policy.converged} after {policy.iterations} sweeps (residual {policy.residual:.3e})",
        f"  value at 1  {policy.value_at(1.0):.9g}",
        f"  pathological {policy.pathological}",
    ]
    _emit(args, body, lines)
    return 0


def _cmd_evaluate(args) -> int:
    problem = TestingProblem(load_model(args.model), _cost_from(args))
    strategy, provenance = _strategy_from(problem, args)
    oc = evaluate_exact(problem.model, problem.cost, strategy, depth_cap=args.depth_cap)
    body = {"command": "evaluate", "file": args.model, "cost": problem.cost.to_json_dict(),
            "strategy": strategy.descriptor(), "depth_cap": args.depth_cap}
    body.update(oc.to_json_dict())
    body["provenance"] = provenance
    lines = [
        f"exact evaluation of {strategy.descriptor()['kind']} (depth cap {args.depth_cap})",
        f"  alpha {oc.alpha}   beta {oc.beta}",
        f"  asn0  {oc.asn0}   asn1 {oc.asn1}",
        f"  risk  {oc.risk} ({float(oc.risk):.6g})" + ("  [lower bound]" if oc.risk_is_lower_bound else ""),
        f"  residual mass {float(oc.residual0):.3g} / {float(oc.residual1):.3g}",
    ]
    _emit(args, body, lines)
    return 0


def _cmd_simulate(args) -> int:
    problem = TestingProblem(load_model(args.model), _cost_from(args))
    strategy, provenance = _strategy_from(problem, args)
    oc = simulate(problem.model, problem.cost, strategy, args.hypothesis,
                  args.runs, args.seed, depth_cap=args.depth_cap)
    body = {"command": "simulate", "file": args.model, "cost": problem.cost.to_json_dict(),
            "strategy": strategy.descriptor(), "depth_cap": args.depth_cap}
    body.update(oc.to_json_dict())
    body["provenance"] = provenance
    shown = ("alpha", oc.alpha) if args.hypothesis == "h0" else ("beta", oc.beta)
    asn = oc.asn0 if args.hypothesis == "h0" else oc.asn1
    lines = [
        f"simulated {args.runs} runs under {args.hypothesis} (seed {args.seed}, {oc.rng})",
        f"  {shown[0]} {shown[1]:.6g} +- {max(oc.stderr.values()):.2g}",
        f"  asn {asn:.6g}",
        f"  truncated runs {oc.truncated_runs}",
    ]
    _emit(args, body, lines)
    return 0


def _cmd_calibrate(args) -> int:
    model = load_model(args.model)
    kwargs = dict(alpha_star=args.alpha, beta_star=args.beta,
                  tol_alpha=args.tol_alpha, tol_beta=args.tol_beta,
                  max_outer_iter=args.max_outer_iter, seed=args.seed)
    if args.runs:
        kwargs.update(evaluation="monte_carlo", runs=args.runs)
    if args.exact_depth:
        kwargs.update(depth_cap=args.exact_depth)
    target = CalibrationTarget(**kwargs)
    result = calibrate(model, target, pi=(parse_rational(args.pi0), parse_rational(args.pi1)))
    body = {"command": "calibrate", "file": args.model,
            "target": {"alpha": args.alpha, "beta": args.beta,
                       "tol_alpha": args.tol_alpha, "tol_beta": args.tol_beta}}
    body.update(result.to_json_dict())
    lines = [
        f"calibrated multipliers lambda0={result.lambda0:.6g} lambda1={result.lambda1:.6g}",
        f"  achieved alpha {result.alpha:.6g} (target {args.alpha})",
        f"  achieved beta  {result.beta:.6g} (target {args.beta})",
        f"  achieved asn0  {result.asn0:.6g}",
        f"  within tolerance {result.within_tolerance}   quantized {result.quantized}",
        f"  evaluations {result.evaluations}",
    ]
    _emit(args, body, lines)
    return 0


def _cmd_structure(args) -> int:
    problem = TestingProblem(load_model(args.model), _cost_from(args))
    policy = _limit_policy(problem, args)
    region = classify_region(policy)
    body = {"command": "structure", "file": args.model, "cost": problem.cost.to_json_dict()}
    body.update(region.to_json_dict())
    body["policy"] = policy.to_json_dict()
    lines = [f"continuation region: {region.kind}"]
    if region.kind == "INTERVAL":
        lines.append(f"  continue while {region.lower:.6g} < Z < {region.upper:.6g}")
    lines.append(f"  {region.diagnostic}")
    if policy.pathological:
        lines.append("  WARNING: pathological regime; sampling may continue indefinitely under H1")
    _emit(args, body, lines)
    return 0


def _cmd_oracle(args) -> int:
    problem = TestingProblem(load_model(args.model), _cost_from(args))
    result = enumerate_optimal(problem, args.horizon)
    body = {"command": "oracle", "file": args.model, "horizon": args.horizon}
    body.update(result.to_json_dict(problem))
    lines = [
        f"oracle optimum over {result.strategies_examined} strategies (horizon {args.horizon})",
        f"  min risk {result.min_risk} (= {float(result.min_risk):.6g})",
    ]
    _emit(args, body, lines)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    problem = TestingProblem(load_model(args.model), _cost_from(args))
    region = None
    pathological = False
    if args.horizon:
        solution = solve_truncated(problem, args.horizon)
        strategy = extract_truncated_strategy(solution)
    else:
        policy = _limit_policy(problem, args)
        strategy = LimitPolicyStrategy(policy, depth_cap=args.strategy_depth_cap)
        region = classify_region(policy)
        pathological = policy.pathological
    app = create_app(problem, strategy, region, pathological)
    port = int(os.environ.get("SEQCTL_PORT", args.port))
    try:
        uvicorn.run(app, host=args.host, port=port, log_level="warning")
    except SystemExit as exc:  # uvicorn signals bind failures this way
        return SOLVER_EXIT if exc.code else 0
    except OSError as exc:
        print(f"error: cannot serve on port {port}: {exc}", file=sys.stderr)
        return SOLVER_EXIT
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "solve": _cmd_solve,
    "evaluate": _cmd_evaluate,
    "simulate": _cmd_simulate,
    "calibrate": _cmd_calibrate,
    "structure": _cmd_structure,
    "oracle": _cmd_oracle,
    "serve": _cmd_serve,
}


def run_command(argv) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        return _COMMANDS[args.command](args)
    except _VALIDATION_ERRORS as exc:
        _report_error(args, exc)
        return VALIDATION_EXIT
    except _SOLVER_ERRORS as exc:
        _report_error(args, exc)
        return SOLVER_EXIT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (ValueError, SeqctlError) as exc:
        _report_error(args, exc)
        return VALIDATION_EXIT


def _report_error(args, exc) -> None:
    code = getattr(exc, "code", "ERROR")
    if getattr(args, "json", False):
        sys.stdout.write(canonical_dumps({"error": code, "message": str(exc)}))
    print(f"error [{code}]: {exc}", file=sys.stderr)


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
