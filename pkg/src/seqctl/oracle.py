"""Brute-force ground truth on tiny instances.

Enumerates every deterministic truncated strategy (each reachable history
node either stops, with the threshold terminal decision, or continues
with one of the controls; depth-N nodes must stop; the no-observation
test is included) and minimizes the exactly-evaluated risk. Serves as the
independent check for the backward-induction solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import TooLargeError
from .problem import TestingProblem
from .ratio import format_ratio
from .strategy import Strategy, StrategyState, decide, evaluate_exact

History = tuple[tuple[str, str], ...]
PlanAction = tuple  # ("stop",) | ("continue", control)

MAX_STRATEGIES = 10_000_000
MAX_DEPTH = 4


class PlanStrategy(Strategy):
    """Strategy fully specified by a map from history to action."""

    def __init__(self, plan: Mapping[History, PlanAction]):
        self.plan = dict(plan)

    def should_stop(self, state: StrategyState) -> bool:
        action = self.plan.get(state.history)
        return action is None or action[0] == "stop"

    def next_control(self, state: StrategyState) -> str:
        return self.plan[state.history][1]


@dataclass(frozen=True)
class OracleResult:
    min_risk: Fraction
    strategies_examined: int
    witness: PlanStrategy

    def witness_description(self, problem: TestingProblem) -> list[dict]:
        """Serializable per-history listing of the witness strategy."""
        model, cost = problem.model, problem.cost
        rows = []
        for history in sorted(self.witness.plan, key=lambda h: (len(h), h)):
            action = self.witness.plan[history]
            row: dict = {"history": [[x, y] for x, y in history]}
            if action[0] == "stop":
                z = Fraction(1)
                dead = False
                for x, y in history:
                    p0, p1 = model.prob0(x, y), model.prob1(x, y)
                    if p0 == 0:
                        dead = True
                        break
                    z = z * p1 / p0
                row["action"] = "stop"
                row["decision"] = ("REJECT_H0" if dead else decide(cost, z).value)
                if not dead:
                    row["z"] = format_ratio(z)
            else:
                row["action"] = "continue"
                row["control"] = action[1]
            rows.append(row)
        return rows

    def to_json_dict(self, problem: TestingProblem) -> dict:
        return {
            "min_risk": format_ratio(self.min_risk),
            "min_risk_float": float(self.min_risk),
            "strategies_examined": self.strategies_examined,
            "witness": self.witness_description(problem),
        }


def count_strategies(problem: TestingProblem, depth: int) -> int:
    """Number of deterministic truncated strategies the enumeration visits."""
    model = problem.model
    arity = [sum(1 for _ in model.live_cells(x)) for x in model.controls]

    def count(d: int) -> int:
        if d == 0:
            return 1
        total = 1  # stop here
        inner = count(d - 1)
        for n_children in arity:
            total += inner ** n_children
        return total

    return count(depth)


def _child_histories(problem: TestingProblem, history: History, x: str) -> list[History]:
    return [history + ((x, y),) for y, _, _ in problem.model.live_cells(x)]


def _plans(problem: TestingProblem, history: History, depth_left: int) -> Iterator[dict]:
    yield {history: ("stop",)}
    if depth_left == 0:
        return
    for x in problem.model.controls:
        children = _child_histories(problem, history, x)
        for combo in _combos(problem, children, depth_left - 1):
            plan = {history: ("continue", x)}
            plan.update(combo)
            yield plan


def _combos(problem: TestingProblem, children: list[History], depth_left: int) -> Iterator[dict]:
    if not children:
        yield {}
        return
    head, tail = children[0], children[1:]
    for head_plan in _plans(problem, head, depth_left):
        for tail_plan in _combos(problem, tail, depth_left):
            merged = dict(head_plan)
            merged.update(tail_plan)
            yield merged


def enumerate_optimal(problem: TestingProblem, depth: int,
                      max_strategies: int = MAX_STRATEGIES) -> OracleResult:
    """Minimum exact risk over all deterministic strategies stopping by
    ``depth``, found by exhaustive enumeration.

    Ties keep the first strategy in enumeration order (stopping options
    come first, controls in declared order), so results are deterministic.
    """
    problem.require_valid()
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > MAX_DEPTH:
        raise TooLargeError(f"oracle depth {depth} exceeds the supported maximum {MAX_DEPTH}")
    total = count_strategies(problem, depth)
    if total > max_strategies:
        raise TooLargeError(
            f"{total} strategies to enumerate exceeds the cap {max_strategies}")

    best_risk: Fraction | None = None
    best_plan: dict | None = None
    examined = 0
    cap = max(depth, 1)
    for plan in _plans(problem, (), depth):
        examined += 1
        oc = evaluate_exact(problem.model, problem.cost, PlanStrategy(plan), depth_cap=cap)
        if best_risk is None or oc.risk < best_risk:
            best_risk, best_plan = oc.risk, plan
    return OracleResult(min_risk=best_risk, strategies_examined=examined,
                        witness=PlanStrategy(best_plan))


__all__ = ["OracleResult", "PlanStrategy", "enumerate_optimal", "count_strategies"]
