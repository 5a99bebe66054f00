"""Exact finite-horizon backward induction on the likelihood ratio.

The value with k observations left at ratio z is

    rho_k(z) = min( g(z), c(z) + min_x sum_y pmf0[x,y] * rho_{k-1}(z * step(x,y)) )

with rho_0 = g, the stopping loss. All arithmetic is exact rational;
states are memoized on (remaining steps, ratio), which is exactly the
collapse of histories sharing a likelihood ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cost import stage_cost, stop_loss, trivial_value
from .errors import HorizonLimitError, NoObservationOptimalError, StateExplosionError
from .model import ratio_step
from .problem import TestingProblem
from .ratio import INF, ONE, Ratio, format_ratio, is_inf
from .strategy import Action, Strategy, StrategyState

DEFAULT_MAX_HORIZON = 64
DEFAULT_MAX_STATES = 5_000_000


@dataclass(frozen=True)
class TableEntry:
    """Value and optimal action at one (remaining-steps, ratio) state.

    ``continue_value`` is the best continuation cost (stage cost plus
    expected successor value); None when no finite continuation exists
    (k = 0, or an infinite stage cost).
    """

    value: Fraction
    action: Action
    best_control: str | None
    continue_value: Fraction | None


class HorizonValueTable:
    """Memoized exact values rho_k(z) for one problem instance.

    Construction validates the model; a populated table is immutable in
    practice (lookups may extend the memo but never change stored entries)
    and safe for concurrent readers once filled.
    """

    def __init__(self, problem: TestingProblem, max_horizon: int = DEFAULT_MAX_HORIZON,
                 max_states: int = DEFAULT_MAX_STATES):
        problem.require_valid()
        self.problem = problem
        self.max_horizon = max_horizon
        self.max_states = max_states
        self._memo: dict[tuple[int, Ratio], TableEntry] = {}
        model = problem.model
        # per control: (p0, step ratio) over cells with positive null mass
        self._cells: list[tuple[str, list[tuple[Fraction, Ratio]]]] = []
        for x in model.controls:
            live = [(p0, ratio_step(model, x, y))
                    for y, p0, _ in model.live_cells(x) if p0 > 0]
            self._cells.append((x, live))

    def __len__(self) -> int:
        return len(self._memo)

    def rho(self, k: int, z: Ratio) -> TableEntry:
        """Exact rho_k(z); populates every reachable subproblem."""
        if k < 0:
            raise ValueError("remaining-step count must be nonnegative")
        if k > self.max_horizon:
            raise HorizonLimitError(
                f"horizon {k} exceeds configured maximum {self.max_horizon}")
        key = (k, z)
        hit = self._memo.get(key)
        if hit is not None:
            return hit

        g = stop_loss(self.problem.cost, z)
        if k == 0:
            entry = TableEntry(g, Action.STOP, None, None)
        else:
            c = stage_cost(self.problem.cost, z)
            if is_inf(c):
                entry = TableEntry(g, Action.STOP, None, None)
            else:
                best: Fraction | None = None
                best_control: str | None = None
                for x, live in self._cells:
                    total = Fraction(0)
                    for p0, r in live:
                        succ = INF if (is_inf(z) or is_inf(r)) else z * r
                        total += p0 * self.rho(k - 1, succ).value
                    if best is None or total < best:
                        best, best_control = total, x
                cont = c + best
                if g <= cont:
                    entry = TableEntry(g, Action.STOP, None, cont)
                else:
                    entry = TableEntry(cont, Action.CONTINUE, best_control, cont)

        if len(self._memo) >= self.max_states:
            raise StateExplosionError(
                f"value table exceeds max_states={self.max_states}")
        self._memo[key] = entry
        return entry

    def continuation_terms(self, k: int, z: Ratio) -> list[tuple[str, Fraction]]:
        """Per-control expected successor values with k steps remaining."""
        if k < 1:
            raise ValueError("continuation needs at least one remaining step")
        out = []
        for x, live in self._cells:
            total = Fraction(0)
            for p0, r in live:
                succ = INF if (is_inf(z) or is_inf(r)) else z * r
                total += p0 * self.rho(k - 1, succ).value
            out.append((x, total))
        return out


def rho_horizon(problem: TestingProblem, k: int, z: Ratio,
                table: HorizonValueTable | None = None,
                max_horizon: int = DEFAULT_MAX_HORIZON,
                max_states: int = DEFAULT_MAX_STATES) -> TableEntry:
    """Exact finite-horizon value at ratio z with k steps remaining."""
    if table is None:
        table = HorizonValueTable(problem, max_horizon=max_horizon, max_states=max_states)
    return table.rho(k, z)


@dataclass(frozen=True)
class TruncatedSolution:
    """Optimal risk over strategies forced to stop within ``horizon`` steps,
    no-observation test included."""

    value: Fraction
    take_observation: bool
    first_control: str | None
    table: HorizonValueTable
    horizon: int

    def to_json_dict(self, include_table: bool = False) -> dict:
        out = {
            "mode": "truncated",
            "horizon": self.horizon,
            "value": format_ratio(self.value),
            "value_float": float(self.value),
            "take_observation": self.take_observation,
            "first_control": self.first_control,
            "trivial_value": format_ratio(trivial_value(self.table.problem.cost)),
            "memo_entries": len(self.table),
        }
        if include_table:
            rows = []
            for (k, z), entry in sorted(self.table._memo.items(),
                                        key=lambda kv: (kv[0][0], is_inf(kv[0][1]), kv[0][1])):
                rows.append({
                    "remaining": k,
                    "z": format_ratio(z),
                    "value": format_ratio(entry.value),
                    "action": entry.action.value,
                    "best_control": entry.best_control,
                })
            out["table"] = rows
        return out


def solve_truncated(problem: TestingProblem, horizon: int,
                    max_states: int = DEFAULT_MAX_STATES,
                    max_horizon: int | None = None) -> TruncatedSolution:
    """Optimal truncated test by backward induction from the root ratio 1.

    The root value min(trivial, stage-cost(1) + best first-step
    continuation) coincides with rho_horizon(horizon, 1); a tie goes to
    the no-observation branch.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    table = HorizonValueTable(problem, max_horizon=max(horizon, max_horizon or DEFAULT_MAX_HORIZON),
                              max_states=max_states)
    root = table.rho(horizon, ONE)
    return TruncatedSolution(
        value=root.value,
        take_observation=root.action is Action.CONTINUE,
        first_control=root.best_control,
        table=table,
        horizon=horizon,
    )


class TruncatedTableStrategy(Strategy):
    """Plays the optimal truncated test recorded in a value table:
    at stage n with ratio Z consult the entry with horizon-n steps left,
    stop on STOP or at the horizon, otherwise apply its best control."""

    ratio_markov = True

    def __init__(self, table: HorizonValueTable, horizon: int):
        self.table = table
        self.horizon = horizon

    def _entry(self, state: StrategyState) -> TableEntry:
        return self.table.rho(self.horizon - state.stage, state.z)

    def next_control(self, state: StrategyState) -> str:
        return self._entry(state).best_control

    def should_stop(self, state: StrategyState) -> bool:
        if state.stage >= self.horizon:
            return True
        return self._entry(state).action is Action.STOP

    def stop_margin(self, state: StrategyState) -> float | None:
        if state.stage >= self.horizon:
            return None
        entry = self._entry(state)
        if entry.continue_value is None:
            return None
        return float(stop_loss(self.table.problem.cost, state.z) - entry.continue_value)

    def descriptor(self) -> dict:
        return {"kind": "TruncatedTableStrategy", "horizon": self.horizon}


def extract_truncated_strategy(solution: TruncatedSolution) -> TruncatedTableStrategy:
    """Strategy attaining the truncated optimum; requires that observing
    beats the no-observation test."""
    if not solution.take_observation:
        raise NoObservationOptimalError(
            "the no-observation test is optimal; there is no observing strategy to extract")
    return TruncatedTableStrategy(solution.table, solution.horizon)


__all__ = [
    "TableEntry", "HorizonValueTable", "TruncatedSolution",
    "rho_horizon", "solve_truncated", "extract_truncated_strategy",
    "TruncatedTableStrategy", "DEFAULT_MAX_HORIZON", "DEFAULT_MAX_STATES",
]
