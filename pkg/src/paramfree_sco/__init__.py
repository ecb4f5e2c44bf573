"""
Parameter-Free SCO

Parameter-free stochastic convex optimization: reliable model selection,
distance-adaptive two-stage optimization, adaptive first-order methods and the
concentration bounds they rest on, with a seeded verification harness.
"""

__version__ = "1.0.0"
__author__ = "Parameter-Free SCO Team"
__description__ = "Parameter-free stochastic convex optimization toolkit"

from .errors import (
    ConfigError,
    InvalidParameterError,
    InvariantViolation,
    OracleUnavailableError,
    ParamFreeError,
    UnboundedObjectiveError,
)

__all__ = [
    "ConfigError",
    "InvalidParameterError",
    "InvariantViolation",
    "OracleUnavailableError",
    "ParamFreeError",
    "UnboundedObjectiveError",
    "__version__",
]
