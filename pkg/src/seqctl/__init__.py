"""Optimal sequential testing of two simple hypotheses with a control
variable choosing each observation's distribution.

Exact finite-horizon solving by backward induction on the likelihood
ratio, an infinite-horizon grid fixed point with the stationary
stop/control rules, exact and Monte Carlo evaluation of operating
characteristics, multiplier calibration to target error levels, and a
live session engine with CLI and HTTP front ends.
"""

from .calibrate import CalibrationResult, CalibrationTarget, calibrate
from .cost import CostSpec, stage_cost, stop_loss, trivial_value
from .limit import (GridConfig, LimitPolicy, LimitPolicyStrategy, RegionReport,
                    classify_region, continuation_value, iterate_to_fixpoint,
                    stopping_decision)
from .model import (ControlledBinaryModel, ValidationReport, Violation,
                    load_model, ratio_step, reachable_ratios, save_model,
                    validate_model)
from .oracle import OracleResult, enumerate_optimal
from .problem import TestingProblem
from .ratio import INF, Ratio, format_ratio, parse_ratio, parse_rational
from .strategy import (ConstantControlSPRT, Decision, OperatingCharacteristics,
                       ScriptedStrategy, Session, SessionState, Strategy,
                       StrategyState, advance, begin_session, decide,
                       evaluate_exact, simulate)
from .truncated import (HorizonValueTable, TruncatedSolution,
                        TruncatedTableStrategy, extract_truncated_strategy,
                        rho_horizon, solve_truncated)

__version__ = "0.1.0"

__all__ = [
    "CalibrationResult", "CalibrationTarget", "calibrate",
    "CostSpec", "stage_cost", "stop_loss", "trivial_value",
    "GridConfig", "LimitPolicy", "LimitPolicyStrategy", "RegionReport",
    "classify_region", "continuation_value", "iterate_to_fixpoint", "stopping_decision",
    "ControlledBinaryModel", "ValidationReport", "Violation",
    "load_model", "ratio_step", "reachable_ratios", "save_model", "validate_model",
    "OracleResult", "enumerate_optimal",
    "TestingProblem",
    "INF", "Ratio", "format_ratio", "parse_ratio", "parse_rational",
    "ConstantControlSPRT", "Decision", "OperatingCharacteristics",
    "ScriptedStrategy", "Session", "SessionState", "Strategy", "StrategyState",
    "advance", "begin_session", "decide", "evaluate_exact", "simulate",
    "HorizonValueTable", "TruncatedSolution", "TruncatedTableStrategy",
    "extract_truncated_strategy", "rho_horizon", "solve_truncated",
    "__version__",
]
