#!/usr/bin/env python3
"""Sweep the error penalties on a model and trace how the continuation
interval and the operating characteristics respond.

Usage:
    python scripts/boundary_sweep.py model.json --lambdas 2 5 10 20 50
"""

import argparse

from seqctl.cost import CostSpec
from seqctl.limit import (GridConfig, LimitPolicyStrategy, classify_region,
                          iterate_to_fixpoint)
from seqctl.model import load_model
from seqctl.problem import TestingProblem
from seqctl.strategy import evaluate_exact


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("model")
    parser.add_argument("--lambdas", nargs="+", default=["2", "5", "10", "20", "50"])
    parser.add_argument("--depth-cap", type=int, default=48)
    parser.add_argument("--grid-points", type=int, default=2001)
    args = parser.parse_args()

    model = load_model(args.model)
    cfg = GridConfig.from_bounds(1e-6, 1e6, args.grid_points, 1e-9)
    print(f"{'lambda':>8} {'region':>12} {'lower':>10} {'upper':>10} "
          f"{'alpha':>9} {'beta':>9} {'asn0':>8} {'asn1':>8}")
    for lam in args.lambdas:
        problem = TestingProblem(model, CostSpec(lam, lam))
        policy = iterate_to_fixpoint(problem, cfg)
        if not policy.converged:
            print(f"{lam:>8} {'UNCONVERGED':>12}")
            continue
        region = classify_region(policy)
        if region.kind == "INTERVAL":
            bounds = f"{region.lower:>10.5f} {region.upper:>10.5f}"
        else:
            bounds = f"{'-':>10} {'-':>10}"
        oc = evaluate_exact(model, problem.cost,
                            LimitPolicyStrategy(policy, depth_cap=args.depth_cap),
                            depth_cap=args.depth_cap)
        flag = "*" if (oc.residual0 or oc.residual1) else " "
        print(f"{lam:>8} {region.kind:>12} {bounds} "
              f"{float(oc.alpha):>9.5f} {float(oc.beta):>9.5f} "
              f"{float(oc.asn0):>8.3f} {float(oc.asn1):>8.3f}{flag}")
    print("(* marks residual mass at the depth cap; those rows are lower bounds)")


if __name__ == "__main__":
    main()
