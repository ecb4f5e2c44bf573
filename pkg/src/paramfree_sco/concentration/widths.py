"""
Deterministic confidence widths from scalar and vector concentration bounds

All logarithms are natural. Sample-variance bounds need n ≥ 2.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from ..errors import InvalidParameterError, check_delta

ENVELOPE_SLACK = 1e-9


@dataclass(frozen=True)
class TailBudget:
    """Failure probability and sample count shared by a family of widths"""
    delta: float
    n: int

    def __post_init__(self) -> None:
        check_delta(self.delta)
        if self.n < 1:
            raise InvalidParameterError(f"n must be positive, got {self.n}")


@dataclass(frozen=True)
class SubGammaTail:
    """P(X ≥ a√ln(1/δ′) + b ln(1/δ′)) ≤ δ′ for every δ′ ∈ (0, 1); ``count`` identical copies"""
    a: float
    b: float = 0.0
    count: int = 1

    def __post_init__(self) -> None:
        if self.a < 0 or self.b < 0:
            raise InvalidParameterError(f"tail coefficients must be nonnegative, got a={self.a}, b={self.b}")
        if self.count < 1:
            raise InvalidParameterError("count must be positive")


def _check_n(n: int, minimum: int = 1) -> None:
    if n < minimum:
        raise InvalidParameterError(f"need at least {minimum} samples, got {n}")


def _check_range(value_range: float) -> float:
    if value_range < 0:
        raise InvalidParameterError(f"range must be nonnegative, got {value_range}")
    return float(value_range)


def hoeffding_width(value_range: float, n: int, delta: float, two_sided: bool = True) -> float:
    """(b − a)√(ln(2/δ)/(2n)) for the two-sided deviation; ln(1/δ) one-sided"""
    check_delta(delta)
    _check_n(n)
    log_term = math.log((2.0 if two_sided else 1.0) / delta)
    return _check_range(value_range) * math.sqrt(log_term / (2.0 * n))


def bennett_width(std: float, value_range: float, n: int, delta: float, two_sided: bool = True) -> float:
    """σ√(2 ln(2/δ)/n) + (b − a) ln(2/δ)/(3n) with the true standard deviation σ"""
    check_delta(delta)
    _check_n(n)
    if std < 0:
        raise InvalidParameterError(f"std must be nonnegative, got {std}")
    log_term = math.log((2.0 if two_sided else 1.0) / delta)
    return std * math.sqrt(2.0 * log_term / n) + _check_range(value_range) * log_term / (3.0 * n)


def empirical_bennett_from_variance(
    sample_variance: ArrayLike, value_range: float, n: int, delta: float, two_sided: bool = False
) -> np.ndarray:
    """Vectorized empirical Bennett width for precomputed unbiased sample variances"""
    check_delta(delta)
    _check_n(n, 2)
    log_term = math.log((4.0 if two_sided else 2.0) / delta)
    s2 = np.asarray(sample_variance, dtype=float)
    return np.sqrt(2.0 * s2 * log_term / n) + 7.0 * _check_range(value_range) * log_term / (3.0 * (n - 1))


def empirical_bennett_width(
    sample_values: ArrayLike, value_range: float, delta: float, two_sided: bool = False
) -> float:
    """√(2 s² ln(2/δ)/n) + 7(b − a) ln(2/δ)/(3(n − 1)); two-sided uses 4/δ"""
    values = np.asarray(sample_values, dtype=float).reshape(-1)
    _check_n(values.size, 2)
    s2 = float(np.var(values, ddof=1))
    return float(empirical_bennett_from_variance(s2, value_range, values.size, delta, two_sided))


def _vectors(sample_vectors: ArrayLike) -> np.ndarray:
    vectors = np.asarray(sample_vectors, dtype=float)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    _check_n(vectors.shape[-2], 2)
    return vectors


def _coordinate_envelopes(vectors: np.ndarray, envelopes: ArrayLike) -> np.ndarray:
    bounds = np.broadcast_to(np.asarray(envelopes, dtype=float), vectors.shape[-1:])
    if np.any(bounds < 0):
        raise InvalidParameterError("envelopes must be nonnegative")
    if np.any(np.abs(vectors) > bounds + ENVELOPE_SLACK):
        raise InvalidParameterError("sample vectors violate the per-coordinate envelope")
    return bounds


def vec_l2_width(sample_vectors: ArrayLike, envelope: float, delta: float) -> Union[float, np.ndarray]:
    """2√(Σ‖V_i − V̄‖₂² ln(6/δ))/n + 10C ln(6/δ)/(n − 1).

    Accepts (n, d) or a stack (..., n, d) of independent sample sets.
    """
    check_delta(delta)
    vectors = _vectors(sample_vectors)
    if envelope < 0 or np.any(np.linalg.norm(vectors, axis=-1) > envelope + ENVELOPE_SLACK):
        raise InvalidParameterError("sample vectors violate the l2 envelope")
    n = vectors.shape[-2]
    log_term = math.log(6.0 / delta)
    spread = np.sum((vectors - vectors.mean(axis=-2, keepdims=True)) ** 2, axis=(-2, -1))
    return _scalar(2.0 * np.sqrt(spread * log_term) / n + 10.0 * envelope * log_term / (n - 1))


def _scalar(values: np.ndarray) -> Union[float, np.ndarray]:
    return float(values) if np.ndim(values) == 0 else values


def _coordinate_spread(vectors: np.ndarray) -> np.ndarray:
    return np.sum((vectors - vectors.mean(axis=-2, keepdims=True)) ** 2, axis=-2)


def vec_inf_width(sample_vectors: ArrayLike, envelopes: ArrayLike, delta: float) -> Union[float, np.ndarray]:
    """max_j [√(2 Σ_i(V_ij − V̄_j)² ln(4d/δ))/(n − 1) + 14 C_j ln(4d/δ)/(3(n − 1))]"""
    check_delta(delta)
    vectors = _vectors(sample_vectors)
    bounds = _coordinate_envelopes(vectors, envelopes)
    n, d = vectors.shape[-2:]
    log_term = math.log(4.0 * d / delta)
    per_coordinate = np.sqrt(2.0 * _coordinate_spread(vectors) * log_term) / (n - 1) + 14.0 * bounds * log_term / (3.0 * (n - 1))
    return _scalar(np.max(per_coordinate, axis=-1))


def vec_l1_width(sample_vectors: ArrayLike, envelopes: ArrayLike, delta: float) -> Union[float, np.ndarray]:
    """Σ_j [(9/4)√(2 Σ_i(V_ij − V̄_j)² ln(30/δ))/(n − 1) + 25 C_j ln(30/δ)/(n − 1)].

    No union over coordinates: coordinates that are almost surely zero with
    C_j = 0 contribute nothing.
    """
    check_delta(delta)
    vectors = _vectors(sample_vectors)
    bounds = _coordinate_envelopes(vectors, envelopes)
    n = vectors.shape[-2]
    log_term = math.log(30.0 / delta)
    per_coordinate = 2.25 * np.sqrt(2.0 * _coordinate_spread(vectors) * log_term) / (n - 1) + 25.0 * bounds * log_term / (n - 1)
    return _scalar(np.sum(per_coordinate, axis=-1))


def _tails(tails: Union[SubGammaTail, Sequence[SubGammaTail]]) -> Sequence[SubGammaTail]:
    return [tails] if isinstance(tails, SubGammaTail) else list(tails)


def dependent_sum_bound(tails: Union[SubGammaTail, Sequence[SubGammaTail]], delta: float) -> float:
    """(9/4)·Σ_j [a_j√ln(6/δ) + b_j ln(6/δ)].

    Holds with probability 1 − δ for possibly dependent X_j provided each X_j
    satisfies its tail inequality at every level δ′, not just at δ.
    """
    check_delta(delta)
    log_term = math.log(6.0 / delta)
    return 2.25 * sum(t.count * (t.a * math.sqrt(log_term) + t.b * log_term) for t in _tails(tails))


def union_bound_sum(tails: Union[SubGammaTail, Sequence[SubGammaTail]], delta: float) -> float:
    """Σ_j [a_j√ln(d/δ) + b_j ln(d/δ)]: each tail at level δ/d, then a union bound"""
    check_delta(delta)
    items = _tails(tails)
    d = sum(t.count for t in items)
    log_term = math.log(d / delta)
    return sum(t.count * (t.a * math.sqrt(log_term) + t.b * log_term) for t in items)
