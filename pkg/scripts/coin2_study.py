#!/usr/bin/env python3
"""End-to-end study of the two-coin instance: exact horizons, the grid
fixed point, the continuation region, and a Monte Carlo cross-check.

Usage:
    python scripts/coin2_study.py [--lambda0 5 --lambda1 5] [--runs 100000]
"""

import argparse
import time
from fractions import Fraction

from seqctl.cost import CostSpec
from seqctl.limit import (GridConfig, LimitPolicyStrategy, classify_region,
                          continuation_value, iterate_to_fixpoint)
from seqctl.model import ControlledBinaryModel
from seqctl.problem import TestingProblem
from seqctl.ratio import ONE
from seqctl.strategy import evaluate_exact, simulate
from seqctl.truncated import HorizonValueTable, extract_truncated_strategy, solve_truncated


def coin2() -> ControlledBinaryModel:
    return ControlledBinaryModel.from_tables(
        ["a", "b"], ["0", "1"],
        {"a": ["1/2", "1/2"], "b": ["1/2", "1/2"]},
        {"a": ["1/4", "3/4"], "b": ["1/3", "2/3"]})


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lambda0", default="5")
    parser.add_argument("--lambda1", default="5")
    parser.add_argument("--runs", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    problem = TestingProblem(coin2(), CostSpec(args.lambda0, args.lambda1))

    print("== exact truncated values ==")
    print(f"{'N':>3} {'value':>12} {'float':>10} {'observe':>8} {'control':>8}")
    for horizon in range(1, 11):
        sol = solve_truncated(problem, horizon)
        print(f"{horizon:>3} {str(sol.value):>12} {float(sol.value):>10.6f} "
              f"{str(sol.take_observation):>8} {str(sol.first_control):>8}")

    print("\n== grid fixed point ==")
    started = time.monotonic()
    policy = iterate_to_fixpoint(problem, GridConfig.from_bounds(1e-4, 1e4, 2001, 1e-9))
    table = HorizonValueTable(problem, max_horizon=30)
    print(f"converged {policy.converged} in {policy.iterations} sweeps "
          f"({time.monotonic() - started:.2f}s), residual {policy.residual:.2e}")
    print(f"value at z=1: grid {policy.value_at(1.0):.9f} "
          f"vs exact 30-step {float(table.rho(30, ONE).value):.9f}")
    value, control = continuation_value(policy, ONE)
    print(f"continuation at z=1: {value:.6f} via control {control!r}")
    region = classify_region(policy)
    if region.kind == "INTERVAL":
        print(f"continue while {region.lower:.6f} < Z < {region.upper:.6f}")
    else:
        print(f"region {region.kind}: {region.diagnostic}")

    print("\n== operating characteristics of the optimal truncated test ==")
    strategy = extract_truncated_strategy(solve_truncated(problem, 2))
    oc = evaluate_exact(problem.model, problem.cost, strategy, depth_cap=16)
    print(f"exact: alpha {oc.alpha}  beta {oc.beta}  asn0 {oc.asn0}  risk {oc.risk}")
    mc0 = simulate(problem.model, problem.cost, strategy, "h0", args.runs, args.seed)
    mc1 = simulate(problem.model, problem.cost, strategy, "h1", args.runs, args.seed)
    print(f"mc:    alpha {mc0.alpha:.5f} (+-{mc0.stderr['alpha']:.5f})  "
          f"beta {mc1.beta:.5f} (+-{mc1.stderr['beta']:.5f})  asn0 {mc0.asn0:.4f}")


if __name__ == "__main__":
    main()
