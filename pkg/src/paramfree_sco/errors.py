"""
Exception hierarchy for Parameter-Free SCO
"""

from typing import Any, Dict, Optional


class ParamFreeError(Exception):
    """Base class for all library errors"""


class ConfigError(ParamFreeError, ValueError):
    """Invalid experiment configuration or command-line input"""


class InvalidParameterError(ParamFreeError, ValueError):
    """A numerical argument is outside its admissible range"""


class OracleUnavailableError(ParamFreeError):
    """Population quantities requested for a problem without an exact oracle"""


class UnboundedObjectiveError(ParamFreeError):
    """The empirical objective has no finite minimizer"""


class InvariantViolation(ParamFreeError):
    """A checked runtime invariant did not hold"""

    def __init__(self, invariant: str, details: Optional[Dict[str, Any]] = None):
        self.invariant = invariant
        self.details = details or {}
        super().__init__(f"Invariant violated: {invariant} {self.details}")

    def to_record(self) -> Dict[str, Any]:
        """Machine-readable failure record"""
        return {"status": "FAILURE", "invariant": self.invariant, **self.details}


def check_delta(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    return float(delta)


def check_positive(name: str, value: float) -> float:
    if not value > 0:
        raise InvalidParameterError(f"{name} must be positive, got {value}")
    return float(value)
