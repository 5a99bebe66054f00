"""Cost structure: error penalties, stopping loss, per-stage sampling cost.

``lambda0``/``lambda1`` price type I/II errors; ``pi0``/``pi1`` weight the
expected sample numbers under the null and the alternative. The default
(1, 0) charges only null-hypothesis sampling; any other mix turns the
objective into the weighted-sample-number variant solved by the same
recursion with a ratio-dependent stage cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ratio import INF, Ratio, is_inf, parse_rational


@dataclass(frozen=True)
class CostSpec:
    lambda0: Fraction
    lambda1: Fraction
    pi0: Fraction = Fraction(1)
    pi1: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("lambda0", "lambda1", "pi0", "pi1"):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))
        if self.lambda0 <= 0 or self.lambda1 <= 0:
            raise ValueError("error penalties lambda0 and lambda1 must be positive")
        if self.pi0 < 0 or self.pi1 < 0:
            raise ValueError("stage weights pi0 and pi1 must be nonnegative")
        if self.pi0 + self.pi1 == 0:
            raise ValueError("at least one stage weight must be positive")

    def with_lambdas(self, lambda0, lambda1) -> "CostSpec":
        return CostSpec(lambda0, lambda1, self.pi0, self.pi1)

    def to_json_dict(self) -> dict:
        from .ratio import format_ratio
        return {
            "lambda0": format_ratio(self.lambda0),
            "lambda1": format_ratio(self.lambda1),
            "pi0": format_ratio(self.pi0),
            "pi1": format_ratio(self.pi1),
        }


def stop_loss(cost: CostSpec, z: Ratio) -> Fraction:
    """Loss of stopping at ratio z with the optimal terminal decision:
    min(lambda0, lambda1 * z); equals lambda0 at z = INF."""
    if is_inf(z):
        return cost.lambda0
    return min(cost.lambda0, cost.lambda1 * z)


def stage_cost(cost: CostSpec, z: Ratio) -> Ratio:
    """Cost of taking one more observation at ratio z: pi0 + pi1 * z.

    INF when pi1 > 0 and z = INF (continuing at an almost-surely-H1 state
    is then never optimal); plain pi0 at INF when pi1 = 0.
    """
    if is_inf(z):
        return INF if cost.pi1 > 0 else cost.pi0
    return cost.pi0 + cost.pi1 * z


def trivial_value(cost: CostSpec) -> Fraction:
    """Risk of deciding with no observations: min(lambda0, lambda1)."""
    return min(cost.lambda0, cost.lambda1)


__all__ = ["CostSpec", "stop_loss", "stage_cost", "trivial_value"]
