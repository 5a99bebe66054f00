"""Multiplier calibration: find error penalties whose optimal strategy
achieves prescribed error levels.

Coordinate search in log-multiplier space: a larger lambda0 drives the
achieved type I error down (heuristically monotone; finite alphabets make
the achieved errors piecewise constant, so exact equality may be
unattainable and the nearest achievable pair is returned flagged
QUANTIZED). Every probe and bracket event is recorded in the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cost import CostSpec
from .errors import CalibrationStallError, InfeasibleTargetError
from .limit import GridConfig, LimitPolicyStrategy, iterate_to_fixpoint
from .model import ControlledBinaryModel
from .problem import TestingProblem
from .ratio import parse_rational
from .strategy import evaluate_exact, simulate


def _calibration_grid() -> GridConfig:
    return GridConfig(log10_zmin=-4.0, log10_zmax=4.0, points=1001, tol=1e-8)


@dataclass(frozen=True)
class CalibrationTarget:
    """Prescribed error levels with tolerances and an evaluation mode."""

    alpha_star: float
    beta_star: float
    tol_alpha: float = 0.005
    tol_beta: float = 0.005
    max_outer_iter: int = 60
    evaluation: str = "exact"  # "exact" | "monte_carlo"
    depth_cap: int = 64
    runs: int = 200_000
    seed: int = 7
    grid: GridConfig = field(default_factory=_calibration_grid)
    lambda_lo: float = 1e-3
    lambda_hi: float = 1e9

    def __post_init__(self):
        if not (0.0 < self.alpha_star < 1.0 and 0.0 < self.beta_star < 1.0):
            raise InfeasibleTargetError(
                f"target error levels must lie in (0,1): ({self.alpha_star}, {self.beta_star})")
        if self.alpha_star + self.beta_star >= 1.0:
            raise InfeasibleTargetError(
                "alpha_star + beta_star >= 1: the guessing test already dominates")
        if self.tol_alpha <= 0 or self.tol_beta <= 0:
            raise ValueError("tolerances must be positive")
        if self.evaluation not in ("exact", "monte_carlo"):
            raise ValueError("evaluation must be 'exact' or 'monte_carlo'")


@dataclass(frozen=True)
class TraceEntry:
    phase: str
    lambda0: float
    lambda1: float
    alpha: float
    beta: float
    bracket_lo: float | None = None
    bracket_hi: float | None = None
    note: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "phase": self.phase,
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "alpha": self.alpha,
            "beta": self.beta,
            "bracket_lo": self.bracket_lo,
            "bracket_hi": self.bracket_hi,
            "note": self.note,
        }


@dataclass(frozen=True)
class CalibrationResult:
    lambda0: float
    lambda1: float
    alpha: float
    beta: float
    asn0: float
    asn1: float | None
    within_tolerance: bool
    quantized: bool
    evaluations: int
    trace: tuple[TraceEntry, ...]

    def to_json_dict(self) -> dict:
        return {
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "alpha": self.alpha,
            "beta": self.beta,
            "asn0": self.asn0,
            "asn1": self.asn1,
            "within_tolerance": self.within_tolerance,
            "quantized": self.quantized,
            "evaluations": self.evaluations,
            "trace": [t.to_json_dict() for t in self.trace],
        }


@dataclass(frozen=True)
class _EvalPoint:
    lambda0: float
    lambda1: float
    alpha: float
    beta: float
    asn0: float
    asn1: float | None


class _Evaluator:
    """Solve-then-evaluate with memoization on the multiplier pair."""

    def __init__(self, model: ControlledBinaryModel, target: CalibrationTarget,
                 pi0: Fraction, pi1: Fraction):
        self.model = model
        self.target = target
        self.pi0 = pi0
        self.pi1 = pi1
        self.cache: dict[tuple[float, float], _EvalPoint] = {}
        self.count = 0

    def __call__(self, lam0: float, lam1: float) -> _EvalPoint:
        key = (lam0, lam1)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        cost = CostSpec(parse_rational(lam0), parse_rational(lam1), self.pi0, self.pi1)
        problem = TestingProblem(self.model, cost)
        policy = iterate_to_fixpoint(problem, self.target.grid)
        if not policy.converged:
            raise CalibrationStallError(
                f"limit solver did not converge at lambda0={lam0:g}, lambda1={lam1:g}")
        strategy = LimitPolicyStrategy(policy, depth_cap=self.target.depth_cap)
        if self.target.evaluation == "exact":
            oc = evaluate_exact(self.model, cost, strategy, depth_cap=self.target.depth_cap)
            point = _EvalPoint(lam0, lam1, float(oc.alpha), float(oc.beta),
                               float(oc.asn0), float(oc.asn1))
        else:
            seed = (self.target.seed + 2 * self.count) % 2**64
            r0 = simulate(self.model, cost, strategy, "h0", self.target.runs, seed,
                          depth_cap=self.target.depth_cap)
            r1 = simulate(self.model, cost, strategy, "h1", self.target.runs,
                          (seed + 1) % 2**64, depth_cap=self.target.depth_cap)
            point = _EvalPoint(lam0, lam1, float(r0.alpha), float(r1.beta),
                               float(r0.asn0), float(r1.asn1) if r1.asn1 is not None else None)
        self.count += 1
        self.cache[key] = point
        return point


def calibrate(model: ControlledBinaryModel, target: CalibrationTarget,
              pi=(1, 0)) -> CalibrationResult:
    """Find multipliers whose induced strategy attains the target errors.

    Alternates a log-space bisection of lambda0 against the type I target
    with one of lambda1 against the type II target until both achieved
    values are within tolerance or the outer budget runs out; the best
    probe by maximum violation is returned either way.
    """
    pi0, pi1 = parse_rational(pi[0]), parse_rational(pi[1])
    evaluate = _Evaluator(model, target, pi0, pi1)
    trace: list[TraceEntry] = []
    bracket_collapsed = False

    def record(phase: str, pt: _EvalPoint, lo=None, hi=None, note=None):
        trace.append(TraceEntry(phase, pt.lambda0, pt.lambda1, pt.alpha, pt.beta,
                                lo, hi, note))

    def violation(pt: _EvalPoint) -> float:
        return max(abs(pt.alpha - target.alpha_star) - target.tol_alpha,
                   abs(pt.beta - target.beta_star) - target.tol_beta)

    def achieved(pt: _EvalPoint, which: str) -> float:
        return pt.alpha if which == "alpha" else pt.beta

    def bisect(which: str, lam_other: float) -> float:
        """Shrink [lambda_lo, lambda_hi] on the chosen coordinate until the
        achieved error is within tolerance or the bracket collapses."""
        nonlocal bracket_collapsed
        goal = target.alpha_star if which == "alpha" else target.beta_star
        tol = target.tol_alpha if which == "alpha" else target.tol_beta
        phase = f"bisect-{which}"

        def probe(lam: float) -> _EvalPoint:
            if which == "alpha":
                return evaluate(lam, lam_other)
            return evaluate(lam_other, lam)

        lo, hi = target.lambda_lo, target.lambda_hi
        pt_lo, pt_hi = probe(lo), probe(hi)
        f_lo = achieved(pt_lo, which) - goal
        f_hi = achieved(pt_hi, which) - goal
        record(phase, pt_lo, lo, hi, "bracket-low")
        record(phase, pt_hi, lo, hi, "bracket-high")
        if abs(f_lo) <= tol:
            return lo
        if abs(f_hi) <= tol:
            return hi
        if not (f_lo > 0 > f_hi):
            record(phase, pt_lo, lo, hi, "bracket-failure")
            raise CalibrationStallError(
                f"cannot bracket the {which} target {goal:g} within multipliers "
                f"[{target.lambda_lo:g}, {target.lambda_hi:g}] "
                f"(achieved {achieved(pt_lo, which):g} at the low end, "
                f"{achieved(pt_hi, which):g} at the high end)")
        best_lam, best_gap = lo, abs(f_lo)
        if abs(f_hi) < best_gap:
            best_lam, best_gap = hi, abs(f_hi)
        while hi / lo > 1.0 + 1e-9:
            mid = math.sqrt(lo * hi)
            pt = probe(mid)
            f_mid = achieved(pt, which) - goal
            record(phase, pt, lo, hi)
            if abs(f_mid) < best_gap:
                best_lam, best_gap = mid, abs(f_mid)
            if abs(f_mid) <= tol:
                return mid
            if f_mid > 0:
                lo = mid
            else:
                hi = mid
        bracket_collapsed = True
        record(phase, probe(best_lam), lo, hi,
               "bracket collapsed before reaching tolerance (quantized)")
        return best_lam

    lam0 = lam1 = math.sqrt(target.lambda_lo * target.lambda_hi)
    best_pt: _EvalPoint | None = None
    done = False
    for _ in range(target.max_outer_iter):
        pt = evaluate(lam0, lam1)
        record("outer", pt)
        if best_pt is None or violation(pt) < violation(best_pt):
            best_pt = pt
        if violation(pt) <= 0:
            done = True
            break
        lam0 = bisect("alpha", lam1)
        lam1 = bisect("beta", lam0)

    final = evaluate(best_pt.lambda0, best_pt.lambda1)
    within = done or violation(final) <= 0
    return CalibrationResult(
        lambda0=final.lambda0, lambda1=final.lambda1,
        alpha=final.alpha, beta=final.beta, asn0=final.asn0, asn1=final.asn1,
        within_tolerance=within,
        quantized=bracket_collapsed and not within, evaluations=evaluate.count,
        trace=tuple(trace))


__all__ = ["CalibrationTarget", "CalibrationResult", "TraceEntry", "calibrate"]
