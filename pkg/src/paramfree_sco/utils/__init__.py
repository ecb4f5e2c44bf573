"""Numerical helpers shared across the package"""

from .norms import (
    NormName,
    dual_norm_name,
    matrix_l2_inf,
    norm,
    parse_norm,
    project_ball,
)
from .rng import counter_stream

__all__ = [
    "NormName",
    "counter_stream",
    "dual_norm_name",
    "matrix_l2_inf",
    "norm",
    "parse_norm",
    "project_ball",
]
