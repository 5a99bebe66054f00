"""Infinite-horizon engine: value iteration to the fixed point on a grid.

Iterates the one-step backward operator on a log-uniform ratio grid,
starting from the stopping loss, until the sup-norm change falls under
the tolerance. Iterates are clamped nonincreasing, mirroring the monotone
convergence of the finite-horizon values. Two virtual endpoints carry the
analytically forced values: 0 at ratio 0, and min(lambda0, continuation)
at +infinity, computed self-consistently. Everything here is binary64;
exactness lives in the finite-horizon engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .cost import stage_cost, stop_loss
from .errors import UnconvergedPolicyError
from .model import ratio_step
from .problem import TestingProblem
from .ratio import Ratio, is_inf
from .strategy import Strategy, StrategyState


@dataclass(frozen=True)
class GridConfig:
    """Log-uniform ratio grid plus iteration limits."""

    log10_zmin: float = -6.0
    log10_zmax: float = 6.0
    points: int = 4001
    tol: float = 1e-9
    max_iter: int = 10_000

    def __post_init__(self):
        if not (self.log10_zmin < 0.0 < self.log10_zmax):
            raise ValueError("grid must span z = 1 (log10_zmin < 0 < log10_zmax)")
        if self.points < 3:
            raise ValueError("grid needs at least 3 points")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")

    @classmethod
    def from_bounds(cls, zmin: float, zmax: float, points: int = 4001,
                    tol: float = 1e-9, max_iter: int = 10_000) -> "GridConfig":
        if not (0 < zmin < 1 < zmax):
            raise ValueError("grid bounds must satisfy 0 < zmin < 1 < zmax")
        return cls(math.log10(zmin), math.log10(zmax), points, tol, max_iter)

    def grid(self) -> np.ndarray:
        return 10.0 ** np.linspace(self.log10_zmin, self.log10_zmax, self.points)


@dataclass
class LimitPolicy:
    """Converged (or flagged) fixed-point values and the stationary rules.

    ``zs`` is the finite grid; the virtual endpoints are carried in
    ``rho_at_zero`` / ``rho_at_inf``. ``contin`` is the continuation cost
    re-evaluated at the final values, so the fixed-point identity
    rho = min(g, contin) holds within the tolerance at every point.
    """

    problem: TestingProblem
    config: GridConfig
    zs: np.ndarray
    rho: np.ndarray
    contin: np.ndarray
    stop_flag: np.ndarray
    best_control: list[str]
    rho_at_zero: float
    rho_at_inf: float
    contin_at_inf: float
    iterations: int
    residual: float
    converged: bool
    pathological: bool
    interp_slack: float

    def require_converged(self) -> None:
        if not self.converged:
            raise UnconvergedPolicyError(
                f"value iteration stopped after {self.iterations} sweeps with residual "
                f"{self.residual:.3e} >= tol {self.config.tol:.3e}")

    def to_json_dict(self, include_grid: bool = False) -> dict:
        out = {
            "mode": "limit",
            "grid_points": int(self.config.points),
            "log10_zmin": self.config.log10_zmin,
            "log10_zmax": self.config.log10_zmax,
            "tol": self.config.tol,
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "pathological": self.pathological,
            "rho_at_zero": self.rho_at_zero,
            "rho_at_inf": self.rho_at_inf,
            "contin_at_inf": None if math.isinf(self.contin_at_inf) else self.contin_at_inf,
            "interp_slack": self.interp_slack,
            "value_at_1": float(self.value_at(1.0)),
        }
        if include_grid:
            out["grid"] = [
                {"z": float(z), "rho": float(r), "contin": float(c),
                 "stop": bool(s), "best_control": b}
                for z, r, c, s, b in zip(self.zs, self.rho, self.contin,
                                         self.stop_flag, self.best_control)
            ]
        return out

    # interpolation of the grid function, scalar form
    def value_at(self, z) -> float:
        if is_inf(z):
            return self.rho_at_inf
        q = float(z)
        if q <= 0.0:
            return 0.0
        zs, rho = self.zs, self.rho
        if q <= zs[0]:
            val = rho[0] * (q / zs[0])
        elif q >= zs[-1]:
            val = rho[-1]
        else:
            i = int(np.searchsorted(zs, q))
            lo, hi = i - 1, i
            t = (q - zs[lo]) / (zs[hi] - zs[lo])
            val = rho[lo] + t * (rho[hi] - rho[lo])
        g = min(float(self.problem.cost.lambda0), float(self.problem.cost.lambda1) * q)
        return float(min(val, g))


def _control_cells(problem: TestingProblem):
    """Per control: float (p0, ratio) pairs over cells with p0 > 0."""
    model = problem.model
    cells = []
    for x in model.controls:
        live = []
        for y, p0, _ in model.live_cells(x):
            if p0 > 0:
                live.append((float(p0), float(ratio_step(model, x, y))))
        cells.append((x, live))
    return cells


def _interp_array(zs: np.ndarray, rho: np.ndarray, zq: np.ndarray,
                  g_of: np.ndarray) -> np.ndarray:
    """Linear-in-z interpolation with the scaled-below / flat-above
    extension, clamped by the stopping loss."""
    out = np.empty_like(zq)
    below = zq <= zs[0]
    above = zq >= zs[-1]
    mid = ~(below | above)
    out[below] = rho[0] * (zq[below] / zs[0])
    out[above] = rho[-1]
    if mid.any():
        idx = np.searchsorted(zs, zq[mid])
        lo = idx - 1
        t = (zq[mid] - zs[lo]) / (zs[idx] - zs[lo])
        out[mid] = rho[lo] + t * (rho[idx] - rho[lo])
    np.minimum(out, g_of, out=out)
    return out


def iterate_to_fixpoint(problem: TestingProblem, cfg: GridConfig | None = None) -> LimitPolicy:
    """Value-iterate the backward operator to its fixed point on the grid.

    Never raises on non-convergence: the returned policy is marked
    unconverged and downstream consumers refuse it loudly.
    """
    problem.require_valid()
    cfg = cfg or GridConfig()
    cost = problem.cost
    lam0 = float(cost.lambda0)
    lam1 = float(cost.lambda1)
    pi0 = float(cost.pi0)
    pi1 = float(cost.pi1)
    zs = cfg.grid()
    g = np.minimum(lam0, lam1 * zs)
    c_vec = pi0 + pi1 * zs

    cells = _control_cells(problem)
    # coefficient multiplying rho(inf) in the continuation at the inf endpoint;
    # zero-ratio cells land on rho(0) = 0 there
    coef_inf = [sum(p0 for p0, r in live if r > 0) for _, live in cells]
    c_inf = math.inf if pi1 > 0 else pi0

    # precompute query grids and their stopping-loss clamps per (control, cell)
    queries = []
    for x, live in cells:
        rows = []
        for p0, r in live:
            if r == 0.0:
                continue  # successor ratio is exactly 0, value 0
            zq = zs * r
            rows.append((p0, zq, np.minimum(lam0, lam1 * zq)))
        queries.append(rows)

    rho = g.copy()
    rho_inf = lam0  # g at +inf
    residual = math.inf
    iterations = 0
    converged = False

    def continuation(rho_now: np.ndarray):
        per_control = []
        for rows in queries:
            s = np.zeros_like(zs)
            for p0, zq, gq in rows:
                s += p0 * _interp_array(zs, rho_now, zq, gq)
            per_control.append(s)
        stacked = np.vstack(per_control)
        best_idx = np.argmin(stacked, axis=0)
        return c_vec + stacked.min(axis=0), best_idx

    for iterations in range(1, cfg.max_iter + 1):
        contin, _ = continuation(rho)
        rho_new = np.minimum(np.minimum(g, contin), rho)
        contin_inf = c_inf + min(coef * rho_inf for coef in coef_inf)
        rho_inf_new = min(lam0, contin_inf, rho_inf)
        residual = max(float(np.max(np.abs(rho_new - rho))), abs(rho_inf_new - rho_inf))
        rho, rho_inf = rho_new, rho_inf_new
        if residual < cfg.tol:
            converged = True
            break

    contin, best_idx = continuation(rho)
    contin_at_inf = c_inf + min(coef * rho_inf for coef in coef_inf)
    stop_flag = g <= contin
    controls = problem.model.controls
    best_control = [controls[i] for i in best_idx]
    pathological = contin_at_inf <= lam0
    dg = float(np.max(np.abs(np.diff(g)))) if len(g) > 1 else 0.0
    return LimitPolicy(
        problem=problem, config=cfg, zs=zs, rho=rho, contin=contin,
        stop_flag=stop_flag, best_control=best_control,
        rho_at_zero=0.0, rho_at_inf=float(rho_inf),
        contin_at_inf=float(contin_at_inf),
        iterations=iterations, residual=float(residual), converged=converged,
        pathological=pathological, interp_slack=10.0 * cfg.tol + dg)


def continuation_value(policy: LimitPolicy, z: Ratio) -> tuple[float, str]:
    """Stage cost plus best expected successor value at ratio z, with the
    lowest-index minimizing control."""
    policy.require_converged()
    cost = policy.problem.cost
    model = policy.problem.model
    c = stage_cost(cost, z)
    c_val = math.inf if is_inf(c) else float(c)
    best_val = math.inf
    best_control = model.controls[0]
    for x, live in _control_cells(policy.problem):
        total = 0.0
        for p0, r in live:
            if is_inf(z):
                succ_val = policy.rho_at_inf if r > 0 else 0.0
            elif r == 0.0:
                succ_val = 0.0
            else:
                succ_val = policy.value_at(float(z) * r)
            total += p0 * succ_val
        if total < best_val:
            best_val, best_control = total, x
    return float(c_val + best_val), best_control


def stopping_decision(policy: LimitPolicy, z: Ratio) -> str:
    """"STOP" iff stopping is at least as cheap as continuing (ties stop)."""
    policy.require_converged()
    g = float(stop_loss(policy.problem.cost, z))
    value, _ = continuation_value(policy, z)
    return "STOP" if g <= value else "CONTINUE"


@dataclass(frozen=True)
class RegionReport:
    """Shape of the continuation region along the ratio axis."""

    kind: str  # INTERVAL | NOT_INTERVAL | ALL_STOP
    lower: float | None
    upper: float | None
    diagnostic: str
    pathological: bool
    lower_bracket: tuple[float, float] | None = None
    upper_bracket: tuple[float, float] | None = None

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "lower": self.lower,
            "upper": self.upper,
            "diagnostic": self.diagnostic,
            "pathological": self.pathological,
            "lower_bracket": list(self.lower_bracket) if self.lower_bracket else None,
            "upper_bracket": list(self.upper_bracket) if self.upper_bracket else None,
        }


def _margin(policy: LimitPolicy, q: float) -> float:
    g = min(float(policy.problem.cost.lambda0), float(policy.problem.cost.lambda1) * q)
    value, _ = continuation_value(policy, q)
    return g - value


def _bisect_threshold(policy: LimitPolicy, lo: float, hi: float) -> float:
    """Root of the stop-continue margin inside [lo, hi] (signs differ)."""
    flo = _margin(policy, lo)
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        fm = _margin(policy, mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    return math.sqrt(lo * hi)


def classify_region(policy: LimitPolicy) -> RegionReport:
    """Classify the continuation set on the grid.

    INTERVAL only when continuation forms one contiguous interior run and
    the policy is not pathological; the threshold estimates are refined by
    bisection inside the bracketing grid cells.
    """
    policy.require_converged()
    cont = ~policy.stop_flag
    n = len(cont)
    if policy.pathological:
        return RegionReport(
            kind="NOT_INTERVAL", lower=None, upper=None, pathological=True,
            diagnostic=("continuation persists as the ratio grows without bound "
                        "(continuation cost at +inf does not exceed lambda0); "
                        "the experiment may continue indefinitely under the alternative"))
    if not cont.any():
        return RegionReport(kind="ALL_STOP", lower=None, upper=None,
                            pathological=False,
                            diagnostic="stopping is optimal at every grid ratio")
    idx = np.flatnonzero(cont)
    first, last = int(idx[0]), int(idx[-1])
    contiguous = bool(cont[first:last + 1].all())
    if not contiguous:
        return RegionReport(kind="NOT_INTERVAL", lower=None, upper=None,
                            pathological=False,
                            diagnostic="continuation set is not contiguous on the grid")
    if first == 0 or last == n - 1:
        return RegionReport(kind="NOT_INTERVAL", lower=None, upper=None,
                            pathological=False,
                            diagnostic="continuation run touches the grid edge; widen the grid")
    zs = policy.zs
    lower = _bisect_threshold(policy, float(zs[first - 1]), float(zs[first]))
    upper = _bisect_threshold(policy, float(zs[last]), float(zs[last + 1]))
    return RegionReport(
        kind="INTERVAL", lower=lower, upper=upper, pathological=False,
        lower_bracket=(float(zs[first - 1]), float(zs[first])),
        upper_bracket=(float(zs[last]), float(zs[last + 1])),
        diagnostic="continue exactly while the ratio stays inside (lower, upper)")


class LimitPolicyStrategy(Strategy):
    """Stationary strategy induced by a converged policy: stop when the
    stopping loss is no worse than the continuation cost, otherwise play
    the minimizing control. A hard depth cap forces a flagged stop."""

    ratio_markov = True

    def __init__(self, policy: LimitPolicy, depth_cap: int = 1000):
        policy.require_converged()
        self.policy = policy
        self.depth_cap = depth_cap
        self._memo: dict = {}

    def _lookup(self, z) -> tuple[float, str]:
        hit = self._memo.get(z)
        if hit is None:
            hit = continuation_value(self.policy, z)
            self._memo[z] = hit
        return hit

    def next_control(self, state: StrategyState) -> str:
        return self._lookup(state.z)[1]

    def should_stop(self, state: StrategyState) -> bool:
        if state.stage >= self.depth_cap:
            return True
        g = float(stop_loss(self.policy.problem.cost, state.z))
        return g <= self._lookup(state.z)[0]

    def forced_stop(self, state: StrategyState) -> bool:
        g = float(stop_loss(self.policy.problem.cost, state.z))
        return state.stage >= self.depth_cap and g > self._lookup(state.z)[0]

    def stop_margin(self, state: StrategyState) -> float | None:
        g = float(stop_loss(self.policy.problem.cost, state.z))
        return float(g - self._lookup(state.z)[0])

    def descriptor(self) -> dict:
        return {"kind": "LimitPolicyStrategy", "depth_cap": self.depth_cap,
                "grid_points": self.policy.config.points,
                "tol": self.policy.config.tol}


__all__ = [
    "GridConfig", "LimitPolicy", "RegionReport", "iterate_to_fixpoint",
    "continuation_value", "stopping_decision", "classify_region",
    "LimitPolicyStrategy",
]
