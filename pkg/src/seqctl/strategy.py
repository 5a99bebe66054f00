"""Strategies, terminal decisions, exact evaluation, simulation, sessions.

A strategy is the pair of behavioral rules driven by the observation
history: which control to apply next and whether to stop sampling. The
terminal decision defaults to the likelihood-ratio threshold rule
(reject H0 iff lambda0 <= lambda1 * Z) unless a strategy overrides it.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .cost import CostSpec, stage_cost, stop_loss
from .errors import SessionFinishedError, StateExplosionError, UnknownIdError
from .model import ControlledBinaryModel, ratio_step
from .problem import TestingProblem
from .ratio import INF, ONE, Ratio, format_ratio, is_inf


class Decision(enum.Enum):
    REJECT_H0 = "REJECT_H0"
    ACCEPT_H0 = "ACCEPT_H0"


class Action(enum.Enum):
    STOP = "STOP"
    CONTINUE = "CONTINUE"


def decide(cost: CostSpec, z: Ratio) -> Decision:
    """Optimal terminal decision at ratio z: reject H0 iff
    lambda0 <= lambda1 * z (ties reject; z = INF rejects, z = 0 accepts)."""
    if is_inf(z):
        return Decision.REJECT_H0
    return Decision.REJECT_H0 if cost.lambda0 <= cost.lambda1 * z else Decision.ACCEPT_H0


@dataclass(frozen=True)
class StrategyState:
    """Observation history snapshot a strategy is consulted with."""

    stage: int
    z: Ratio
    history: tuple[tuple[str, str], ...] = ()


class Strategy:
    """Behavioral interface: next control and stop verdict per state.

    ``terminal_decision`` may return None, meaning the threshold rule
    :func:`decide` applies; ``stop_margin`` is an optional diagnostic,
    negative when stopping is strictly better than continuing.
    ``ratio_markov`` declares that all three rules depend on the state
    only through (stage, ratio), which lets exact evaluation merge
    histories sharing a ratio.
    """

    ratio_markov = False

    def next_control(self, state: StrategyState) -> str:
        raise NotImplementedError

    def should_stop(self, state: StrategyState) -> bool:
        raise NotImplementedError

    def terminal_decision(self, state: StrategyState, cost: CostSpec) -> Decision | None:
        return None

    def stop_margin(self, state: StrategyState) -> float | None:
        return None

    def forced_stop(self, state: StrategyState) -> bool:
        """True when the stop verdict comes from a hard depth cap."""
        return False

    def descriptor(self) -> dict:
        return {"kind": type(self).__name__}


@dataclass
class ConstantControlSPRT(Strategy):
    """Fixed control; continue exactly while lower < Z < upper."""

    control: str
    lower: Fraction | float
    upper: Fraction | float
    ratio_markov = True

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("SPRT thresholds must satisfy lower < upper")

    def next_control(self, state: StrategyState) -> str:
        return self.control

    def should_stop(self, state: StrategyState) -> bool:
        return not (self.lower < state.z < self.upper)

    def descriptor(self) -> dict:
        return {"kind": "ConstantControlSPRT", "control": self.control,
                "lower": float(self.lower), "upper": float(self.upper)}


class ScriptedStrategy(Strategy):
    """Test helper driven by plain callables on the state."""

    def __init__(self, control_fn: Callable[[StrategyState], str],
                 stop_fn: Callable[[StrategyState], bool],
                 decision_fn: Callable[[StrategyState], Decision] | None = None):
        self._control_fn = control_fn
        self._stop_fn = stop_fn
        self._decision_fn = decision_fn

    def next_control(self, state: StrategyState) -> str:
        return self._control_fn(state)

    def should_stop(self, state: StrategyState) -> bool:
        return self._stop_fn(state)

    def terminal_decision(self, state: StrategyState, cost: CostSpec) -> Decision | None:
        return self._decision_fn(state) if self._decision_fn else None


def terminal_decision(strategy: Strategy, cost: CostSpec, state: StrategyState) -> Decision:
    explicit = strategy.terminal_decision(state, cost)
    return explicit if explicit is not None else decide(cost, state.z)


@dataclass(frozen=True)
class OperatingCharacteristics:
    """Error probabilities, expected sample numbers, and combined risk.

    EXACT mode carries Fractions and zero-or-positive residual mass left
    alive at the depth cap (excluded from the estimates, reported as is;
    risk is then a lower bound). MONTE_CARLO carries float estimates with
    standard errors; fields not estimable under the simulated hypothesis
    are None.
    """

    mode: str
    alpha: Fraction | float | None
    beta: Fraction | float | None
    asn0: Fraction | float | None
    asn1: Fraction | float | None
    risk: Fraction | float | None
    residual0: Fraction | float | None
    residual1: Fraction | float | None
    risk_is_lower_bound: bool = False
    stderr: Mapping[str, float] = field(default_factory=dict)
    hypothesis: str | None = None
    runs: int | None = None
    seed: int | None = None
    rng: str | None = None
    truncated_runs: int | None = None

    def to_json_dict(self) -> dict:
        def num(v):
            if v is None:
                return None
            if isinstance(v, Fraction):
                return format_ratio(v)
            return float(v)

        out = {
            "mode": self.mode,
            "alpha": num(self.alpha),
            "beta": num(self.beta),
            "asn0": num(self.asn0),
            "asn1": num(self.asn1),
            "risk": num(self.risk),
            "risk_is_lower_bound": self.risk_is_lower_bound,
            "residual0": num(self.residual0),
            "residual1": num(self.residual1),
        }
        if self.mode == "MONTE_CARLO":
            out["stderr"] = dict(self.stderr)
            out["hypothesis"] = self.hypothesis
            out["runs"] = self.runs
            out["seed"] = self.seed
            out["rng"] = self.rng
            out["truncated_runs"] = self.truncated_runs
        return out


def evaluate_exact(model: ControlledBinaryModel, cost: CostSpec, strategy: Strategy,
                   depth_cap: int = 64, max_nodes: int = 1_000_000) -> OperatingCharacteristics:
    """Exact operating characteristics by breadth-first path enumeration.

    Path masses under each hypothesis are exact products of pmf entries;
    nodes still alive at ``depth_cap`` contribute only to the residuals.
    Ratio-Markov strategies are evaluated on states merged by (stage,
    ratio), which changes nothing in the sums but collapses the tree.
    """
    if depth_cap < 1:
        raise ValueError("depth_cap must be >= 1")
    TestingProblem(model, cost).require_valid()
    zero = Fraction(0)
    alpha = beta = asn0 = asn1 = zero
    residual0 = residual1 = zero
    nodes = 0

    def account(state: StrategyState, m0: Fraction, m1: Fraction) -> bool:
        """Fold a stopped or capped node into the accumulators; True when
        the node still expands."""
        nonlocal alpha, beta, asn0, asn1, residual0, residual1
        if strategy.should_stop(state):
            dec = terminal_decision(strategy, cost, state)
            if dec is Decision.REJECT_H0:
                alpha += m0
            else:
                beta += m1
            asn0 += state.stage * m0
            asn1 += state.stage * m1
            return False
        if state.stage >= depth_cap:
            residual0 += m0
            residual1 += m1
            return False
        return True

    if strategy.ratio_markov:
        level: dict[Ratio, tuple[Fraction, Fraction]] = {ONE: (Fraction(1), Fraction(1))}
        stage = 0
        while level:
            nxt: dict[Ratio, tuple[Fraction, Fraction]] = {}
            for z, (m0, m1) in level.items():
                nodes += 1
                if nodes > max_nodes:
                    raise StateExplosionError(f"evaluation exceeded max_nodes={max_nodes}")
                state = StrategyState(stage, z, ())
                if not account(state, m0, m1):
                    continue
                x = model.require_control(strategy.next_control(state))
                for y, p0, p1 in model.live_cells(x):
                    cm0 = m0 * p0
                    cm1 = m1 * p1
                    if cm0 == 0 and cm1 == 0:
                        continue
                    r = ratio_step(model, x, y)
                    zc = INF if (is_inf(z) or is_inf(r)) else z * r
                    old = nxt.get(zc)
                    nxt[zc] = (cm0, cm1) if old is None else (old[0] + cm0, old[1] + cm1)
            level = nxt
            stage += 1
    else:
        queue: deque[tuple[StrategyState, Fraction, Fraction]] = deque()
        queue.append((StrategyState(0, ONE, ()), Fraction(1), Fraction(1)))
        while queue:
            state, m0, m1 = queue.popleft()
            nodes += 1
            if nodes > max_nodes:
                raise StateExplosionError(f"evaluation exceeded max_nodes={max_nodes}")
            if not account(state, m0, m1):
                continue
            x = model.require_control(strategy.next_control(state))
            for y, p0, p1 in model.live_cells(x):
                cm0 = m0 * p0
                cm1 = m1 * p1
                if cm0 == 0 and cm1 == 0:
                    continue
                r = ratio_step(model, x, y)
                z = INF if (is_inf(state.z) or is_inf(r)) else state.z * r
                queue.append((StrategyState(state.stage + 1, z, state.history + ((x, y),)), cm0, cm1))

    risk = cost.pi0 * asn0 + cost.pi1 * asn1 + cost.lambda0 * alpha + cost.lambda1 * beta
    return OperatingCharacteristics(
        mode="EXACT", alpha=alpha, beta=beta, asn0=asn0, asn1=asn1, risk=risk,
        residual0=residual0, residual1=residual1,
        risk_is_lower_bound=bool(residual0 or residual1))


RNG_NAME = "philox4x64-128 key=(seed<<64)|run"


def _run_stream(seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed << 64) | run_index))


def simulate(model: ControlledBinaryModel, cost: CostSpec, strategy: Strategy,
             hypothesis: str, runs: int, seed: int,
             depth_cap: int = 64) -> OperatingCharacteristics:
    """Monte Carlo operating characteristics under one stated hypothesis.

    Each run draws from its own counter-based substream keyed by
    (seed, run index), so reports are reproducible and independent of
    execution order. Runs still alive at depth_cap are counted as
    truncated and excluded from the estimates.
    """
    if hypothesis not in ("h0", "h1"):
        raise ValueError("hypothesis must be 'h0' or 'h1'")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    TestingProblem(model, cost).require_valid()

    table = model.pmf0 if hypothesis == "h0" else model.pmf1
    cells: dict[str, list[tuple[str, float, Ratio]]] = {}
    for x in model.controls:
        row = []
        acc = 0.0
        for y, p in zip(model.outcomes, table[x]):
            if p == 0:
                continue
            acc += float(p)
            row.append((y, acc, ratio_step(model, x, y)))
        cells[x] = row

    sample_sizes: list[int] = []
    rejects: list[bool] = []
    truncated = 0
    for i in range(runs):
        rng = _run_stream(seed, i)
        state = StrategyState(0, ONE, ())
        hit_cap = False
        while not strategy.should_stop(state):
            if state.stage >= depth_cap:
                hit_cap = True
                break
            x = model.require_control(strategy.next_control(state))
            u = rng.random()
            row = cells[x]
            y, r = row[-1][0], row[-1][2]
            for yy, cum, rr in row:
                if u < cum:
                    y, r = yy, rr
                    break
            z = INF if (is_inf(state.z) or is_inf(r)) else state.z * r
            state = StrategyState(state.stage + 1, z, state.history + ((x, y),))
        if hit_cap:
            truncated += 1
            continue
        sample_sizes.append(state.stage)
        rejects.append(terminal_decision(strategy, cost, state) is Decision.REJECT_H0)

    m = len(sample_sizes)
    stderr: dict[str, float] = {}
    alpha = beta = asn0 = asn1 = None
    if m > 0:
        prop_reject = sum(rejects) / m
        asn = float(np.mean(sample_sizes))
        se_prop = float(np.sqrt(prop_reject * (1.0 - prop_reject) / m))
        se_asn = float(np.std(sample_sizes, ddof=1) / np.sqrt(m)) if m > 1 else 0.0
        if hypothesis == "h0":
            alpha, asn0 = prop_reject, asn
            stderr = {"alpha": se_prop, "asn0": se_asn}
        else:
            beta, asn1 = 1.0 - prop_reject, asn
            stderr = {"beta": se_prop, "asn1": se_asn}
    res = truncated / runs
    return OperatingCharacteristics(
        mode="MONTE_CARLO", alpha=alpha, beta=beta, asn0=asn0, asn1=asn1, risk=None,
        residual0=res if hypothesis == "h0" else None,
        residual1=res if hypothesis == "h1" else None,
        stderr=stderr, hypothesis=hypothesis, runs=runs, seed=seed,
        rng=RNG_NAME, truncated_runs=truncated)


@dataclass(frozen=True)
class SessionState:
    """Immutable snapshot of a stepwise testing session."""

    stage: int
    z: Ratio
    history: tuple[tuple[str, str], ...]
    stopped: bool
    decision: Decision | None
    recommended_control: str | None
    margin: float | None
    forced_stop: bool = False

    def to_json_dict(self) -> dict:
        log10_z = None
        if not is_inf(self.z) and self.z > 0:
            log10_z = float(np.log10(float(self.z)))
        margin = self.margin
        if margin is not None and not np.isfinite(margin):
            margin = None
        return {
            "stage": self.stage,
            "z": format_ratio(self.z),
            "log10_z": log10_z,
            "recommended_control": self.recommended_control,
            "stopped": self.stopped,
            "decision": self.decision.value if self.decision else None,
            "margin": margin,
            "forced_stop": self.forced_stop,
            "history": [{"control": x, "outcome": y} for x, y in self.history],
        }


class Session:
    """Live stepwise execution of a strategy against manually-entered
    outcomes; single-threaded, one logical writer."""

    def __init__(self, model: ControlledBinaryModel, cost: CostSpec, strategy: Strategy):
        self.model = model
        self.cost = cost
        self.strategy = strategy
        self.state = self._snapshot(StrategyState(0, ONE, ()))

    def _snapshot(self, st: StrategyState) -> SessionState:
        stopped = self.strategy.should_stop(st)
        forced = self.strategy.forced_stop(st) if stopped else False
        decision = terminal_decision(self.strategy, self.cost, st) if stopped else None
        recommended = None if stopped else self.model.require_control(self.strategy.next_control(st))
        margin = self.strategy.stop_margin(st)
        return SessionState(stage=st.stage, z=st.z, history=st.history, stopped=stopped,
                            decision=decision, recommended_control=recommended,
                            margin=margin, forced_stop=forced)

    def advance(self, outcome: str) -> SessionState:
        if self.state.stopped:
            raise SessionFinishedError("session already stopped; no further observations accepted")
        if outcome not in self.model.outcomes:
            raise UnknownIdError(f"unknown outcome {outcome!r}")
        x = self.state.recommended_control
        r = ratio_step(self.model, x, outcome)
        z = INF if (is_inf(self.state.z) or is_inf(r)) else self.state.z * r
        st = StrategyState(self.state.stage + 1, z, self.state.history + ((x, outcome),))
        self.state = self._snapshot(st)
        return self.state


def begin_session(model: ControlledBinaryModel, cost: CostSpec, strategy: Strategy) -> Session:
    TestingProblem(model, cost).require_valid()
    return Session(model, cost, strategy)


def advance(session: Session, outcome: str) -> SessionState:
    return session.advance(outcome)


__all__ = [
    "Decision", "Action", "decide", "StrategyState", "Strategy",
    "ConstantControlSPRT", "ScriptedStrategy", "terminal_decision",
    "OperatingCharacteristics", "evaluate_exact", "simulate",
    "Session", "SessionState", "begin_session", "advance", "RNG_NAME",
]
