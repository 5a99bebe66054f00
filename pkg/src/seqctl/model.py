"""Controlled two-hypothesis observation models over finite alphabets.

A model fixes a finite set of controls and a finite outcome alphabet, and
for each control the conditional outcome pmf under each hypothesis. All
probabilities are exact rationals; observations under a chosen control are
independent across stages, so path probabilities are plain products.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DeadCellError, StateExplosionError, UnknownIdError
from .ratio import INF, ONE, Ratio, is_inf, parse_rational

ROW_SUM_TOLERANCE = Fraction(1, 10**12)


@dataclass(frozen=True)
class ControlledBinaryModel:
    """Finite control set, finite outcome alphabet, two conditional pmf tables.

    ``pmf0[control]`` and ``pmf1[control]`` are tuples aligned with
    ``outcomes``. Instances are immutable and safe to share.
    """

    controls: tuple[str, ...]
    outcomes: tuple[str, ...]
    pmf0: Mapping[str, tuple[Fraction, ...]]
    pmf1: Mapping[str, tuple[Fraction, ...]]

    @classmethod
    def from_tables(cls, controls: Iterable[str], outcomes: Iterable[str],
                    pmf0: Mapping[str, Iterable], pmf1: Mapping[str, Iterable]) -> "ControlledBinaryModel":
        """Build a model from loosely-typed tables (decimal strings,
        ``num/den`` mappings, ints, Fractions)."""
        controls = tuple(str(x) for x in controls)
        outcomes = tuple(str(y) for y in outcomes)

        def table(raw: Mapping[str, Iterable]) -> dict[str, tuple[Fraction, ...]]:
            return {x: tuple(parse_rational(p) for p in raw[x]) for x in controls if x in raw}

        return cls(controls=controls, outcomes=outcomes, pmf0=table(pmf0), pmf1=table(pmf1))

    def index_of_outcome(self, y: str) -> int:
        try:
            return self.outcomes.index(y)
        except ValueError:
            raise UnknownIdError(f"unknown outcome {y!r}") from None

    def require_control(self, x: str) -> str:
        if x not in self.controls:
            raise UnknownIdError(f"unknown control {x!r}")
        return x

    def prob0(self, x: str, y: str) -> Fraction:
        return self.pmf0[self.require_control(x)][self.index_of_outcome(y)]

    def prob1(self, x: str, y: str) -> Fraction:
        return self.pmf1[self.require_control(x)][self.index_of_outcome(y)]

    def is_dead_cell(self, x: str, y: str) -> bool:
        """True when both hypotheses give the cell probability zero."""
        return self.prob0(x, y) == 0 and self.prob1(x, y) == 0

    def live_cells(self, x: str):
        """Yield ``(outcome, p0, p1)`` for non-dead cells under control x."""
        x = self.require_control(x)
        for y, p0, p1 in zip(self.outcomes, self.pmf0[x], self.pmf1[x]):
            if p0 != 0 or p1 != 0:
                yield y, p0, p1

    def to_json_dict(self) -> dict:
        """Bit-exact serializable form (probabilities as num/den strings)."""
        def row(table, x):
            return [_prob_string(p) for p in table[x]]

        return {
            "controls": list(self.controls),
            "outcomes": list(self.outcomes),
            "pmf0": {x: row(self.pmf0, x) for x in self.controls},
            "pmf1": {x: row(self.pmf1, x) for x in self.controls},
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ControlledBinaryModel":
        missing = [k for k in ("controls", "outcomes", "pmf0", "pmf1") if k not in data]
        if missing:
            raise ValueError(f"model file missing fields: {missing}")
        return cls.from_tables(data["controls"], data["outcomes"], data["pmf0"], data["pmf1"])


def _prob_string(p: Fraction) -> str:
    if p.denominator == 1:
        return str(p.numerator)
    return f"{p.numerator}/{p.denominator}"


def load_model(path) -> ControlledBinaryModel:
    with open(path, "r", encoding="utf-8") as fh:
        return ControlledBinaryModel.from_json_dict(json.load(fh))


def save_model(model: ControlledBinaryModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_json_dict(), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class Violation:
    """One validation finding; ``severity`` is ERROR or WARNING."""

    code: str
    message: str
    control: str | None = None
    outcome: str | None = None
    severity: str = "ERROR"

    def to_json_dict(self) -> dict:
        out = {"code": self.code, "severity": self.severity, "message": self.message}
        if self.control is not None:
            out["control"] = self.control
        if self.outcome is not None:
            out["outcome"] = self.outcome
        return out


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """True when no ERROR-severity violations are present."""
        return not any(v.severity == "ERROR" for v in self.violations)

    @property
    def empty(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def to_json_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json_dict() for v in self.violations]}


def validate_model(model: ControlledBinaryModel) -> ValidationReport:
    """Check every model invariant; never raises.

    The report is empty iff the model is fully clean; DEAD_CELL entries are
    warnings (solvers tolerate them), everything else is an error.
    """
    report = ValidationReport()
    add = report.violations.append

    if not model.controls:
        add(Violation("EMPTY_CONTROLS", "controls list is empty"))
    if not model.outcomes:
        add(Violation("EMPTY_OUTCOMES", "outcomes list is empty"))
    for name, items in (("DUPLICATE_CONTROL", model.controls), ("DUPLICATE_OUTCOME", model.outcomes)):
        seen = set()
        for item in items:
            if item in seen:
                add(Violation(name, f"duplicate identifier {item!r}"))
            seen.add(item)

    for label, table in (("pmf0", model.pmf0), ("pmf1", model.pmf1)):
        for x in model.controls:
            if x not in table:
                add(Violation("MISSING_ROW", f"{label} has no row for control {x!r}", control=x))
                continue
            row = table[x]
            if len(row) != len(model.outcomes):
                add(Violation("ROW_LENGTH", f"{label}[{x!r}] has {len(row)} entries, expected {len(model.outcomes)}", control=x))
                continue
            for y, p in zip(model.outcomes, row):
                if p < 0:
                    add(Violation("NEGATIVE_PROB", f"{label}[{x!r},{y!r}] = {p} is negative", control=x, outcome=y))
            total = sum(row)
            if abs(total - 1) > ROW_SUM_TOLERANCE:
                add(Violation("ROW_SUM", f"{label}[{x!r}] sums to {total}, expected 1", control=x))

    if report.ok:
        for x in model.controls:
            for y in model.outcomes:
                if model.is_dead_cell(x, y):
                    add(Violation("DEAD_CELL", f"cell ({x!r},{y!r}) has zero probability under both hypotheses",
                                  control=x, outcome=y, severity="WARNING"))
    return report


def ratio_step(model: ControlledBinaryModel, x: str, y: str) -> Ratio:
    """Single-observation likelihood ratio pmf1/pmf0 for cell (x, y).

    Returns INF when pmf0 is zero but pmf1 is positive. Dead cells have no
    ratio and raise DeadCellError.
    """
    p0 = model.prob0(x, y)
    p1 = model.prob1(x, y)
    if p0 == 0 and p1 == 0:
        raise DeadCellError(f"cell ({x!r},{y!r}) is dead under both hypotheses")
    if p0 == 0:
        return INF
    return p1 / p0


def reachable_ratios(model: ControlledBinaryModel, depth: int,
                     max_states: int = 5_000_000) -> set[Ratio]:
    """Exact set of ratio products over all control/outcome paths of
    length <= depth (the empty product 1 included). INF absorbs."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    steps = [ratio_step(model, x, y)
             for x in model.controls for y, _, _ in model.live_cells(x)]
    reached: set[Ratio] = {ONE}
    frontier: set[Ratio] = {ONE}
    for _ in range(depth):
        nxt = set()
        for z in frontier:
            for r in steps:
                prod = INF if (is_inf(z) or is_inf(r)) else z * r
                if prod not in reached:
                    nxt.add(prod)
        reached |= nxt
        if len(reached) > max_states:
            raise StateExplosionError(
                f"reachable ratio set exceeds max_states={max_states} at depth {depth}")
        frontier = nxt
        if not frontier:
            break
    return reached


def model_fingerprint_text(model: ControlledBinaryModel) -> str:
    """Canonical text used for fingerprinting model identity."""
    return json.dumps(model.to_json_dict(), sort_keys=True, separators=(",", ":"))


__all__ = [
    "ControlledBinaryModel", "ValidationReport", "Violation",
    "validate_model", "ratio_step", "reachable_ratios",
    "load_model", "save_model", "model_fingerprint_text",
    "ROW_SUM_TOLERANCE",
]
