"""
Confidence width rules for model selection
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..errors import InvalidParameterError, check_delta
from .loss_matrix import LossMatrix

# Provenance tags written into selection reports
THEORY_RULE = "theory_eq4"
PRACTICAL_RULE = "practical_sec5"
MULTI_GEOMETRY_RULE = "multi_geometry"
CUSTOM_RULE = "custom"


@dataclass(frozen=True)
class ConfidenceWidths:
    """τ_0..τ_K with τ_0 = 0, plus the rule and parameters that produced them"""
    tau: np.ndarray
    rule: str
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        tau = np.asarray(self.tau, dtype=float).reshape(-1)
        if tau.size == 0 or tau[0] != 0.0:
            raise InvalidParameterError("the reference width tau[0] must be exactly 0")
        if np.any(tau < 0) or not np.all(np.isfinite(tau)):
            raise InvalidParameterError("widths must be finite and nonnegative")
        object.__setattr__(self, "tau", tau)


def _check_count(name: str, values: ArrayLike, losses: LossMatrix) -> np.ndarray:
    array = np.asarray(values, dtype=float).reshape(-1)
    if array.size != losses.K + 1:
        raise InvalidParameterError(f"{name} needs {losses.K + 1} entries, got {array.size}")
    return array


def widths_theory(losses: LossMatrix, lipschitz_hat: float, x_norms: ArrayLike, delta: float) -> ConfidenceWidths:
    """τ_k = √(2c̃σ̂_k²/n) + c̃·14L̂‖x_k‖/(3(n − 1)) with c̃ = ln(4K/δ).

    σ̂_k² is the sample variance of f_i(x_k) − f_i(x₀); ‖x_k‖ is measured in the
    norm whose dual bounds the gradients by L̂.
    """
    check_delta(delta)
    if lipschitz_hat < 0:
        raise InvalidParameterError("lipschitz_hat must be nonnegative")
    norms = _check_count("x_norms", x_norms, losses)
    params = {"delta": delta, "lipschitz_hat": lipschitz_hat}
    if losses.K == 0:
        return ConfidenceWidths(np.zeros(1), THEORY_RULE, params)
    n = losses.n
    c_tilde = math.log(4.0 * losses.K / delta)
    tau = np.sqrt(2.0 * c_tilde * losses.difference_variances() / n) + c_tilde * 14.0 * lipschitz_hat * norms / (3.0 * (n - 1))
    tau[0] = 0.0
    return ConfidenceWidths(tau, THEORY_RULE, {**params, "c_tilde": c_tilde})


def widths_practical(losses: LossMatrix, m_values: ArrayLike) -> ConfidenceWidths:
    """τ_k = σ̂_k/(2√n) + M(x_k)/(2n), where M(x_k) bounds |f(x_k; S) − f(x₀; S)|"""
    bounds = _check_count("M values", m_values, losses)
    if np.any(bounds < 0):
        raise InvalidParameterError("M values must be nonnegative")
    n = losses.n
    tau = np.sqrt(losses.difference_variances()) / (2.0 * math.sqrt(n)) + bounds / (2.0 * n)
    tau[0] = 0.0
    return ConfidenceWidths(tau, PRACTICAL_RULE, {"m_values": bounds.tolist()})


def widths_multi_geometry(
    losses: LossMatrix,
    points: np.ndarray,
    lipschitz: Sequence[float],
    delta: float,
) -> ConfidenceWidths:
    """Widths for choosing among geometry-specific candidates (reference x₀ = 0 in column 0).

    τ_k = √(2σ̂_k² ln(12/δ)/n) + (14/3)(ln(12/δ)/(n − 1))·min(L̂‖x_k‖₂, ‖ℓ̂‖∞‖x_k‖₁, ‖ℓ̂‖₁‖x_k‖∞)
    with ``lipschitz`` = (L̂, ‖ℓ̂‖∞, ‖ℓ̂‖₁).
    """
    check_delta(delta)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] != losses.K + 1:
        raise InvalidParameterError(f"need {losses.K + 1} points, got {points.shape[0]}")
    l2_bound, inf_bound, one_bound = (float(v) for v in lipschitz)
    envelope = np.minimum.reduce([
        l2_bound * np.linalg.norm(points, ord=2, axis=1),
        inf_bound * np.linalg.norm(points, ord=1, axis=1),
        one_bound * np.linalg.norm(points, ord=np.inf, axis=1),
    ])
    n = losses.n
    log_term = math.log(12.0 / delta)
    tau = np.sqrt(2.0 * losses.difference_variances() * log_term / n) + (14.0 / 3.0) * (log_term / (n - 1)) * envelope
    tau[0] = 0.0
    return ConfidenceWidths(tau, MULTI_GEOMETRY_RULE, {"delta": delta, "lipschitz": [l2_bound, inf_bound, one_bound]})


def widths_from_column(tau: ArrayLike) -> ConfidenceWidths:
    """User-supplied widths; τ_0 must already be 0"""
    return ConfidenceWidths(np.asarray(tau, dtype=float), CUSTOM_RULE)
