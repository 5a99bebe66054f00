"""Exception hierarchy with machine-readable error codes.

Every error that can cross the CLI or HTTP boundary carries a stable
``code`` string so callers can dispatch without parsing messages.
"""

from __future__ import annotations


class SeqctlError(Exception):
    """Base class; ``code`` is the machine-readable identifier."""

    code = "ERROR"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownIdError(SeqctlError):
    code = "UNKNOWN_ID"


class DeadCellError(SeqctlError):
    code = "DEAD_CELL"


class StateExplosionError(SeqctlError):
    code = "STATE_EXPLOSION"


class HorizonLimitError(SeqctlError):
    code = "HORIZON_LIMIT"


class NoObservationOptimalError(SeqctlError):
    code = "NO_OBSERVATION_OPTIMAL"


class UnconvergedPolicyError(SeqctlError):
    code = "UNCONVERGED_POLICY"


class NoConvergenceError(SeqctlError):
    code = "NO_CONVERGENCE"


class SessionFinishedError(SeqctlError):
    code = "SESSION_FINISHED"


class InfeasibleTargetError(SeqctlError):
    code = "INFEASIBLE_TARGET"


class CalibrationStallError(SeqctlError):
    code = "CALIBRATION_STALL"


class TooLargeError(SeqctlError):
    code = "TOO_LARGE"


class InvalidModelError(SeqctlError):
    """Raised by solvers handed a model that fails validation."""

    code = "INVALID_MODEL"
