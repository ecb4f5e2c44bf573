"""
Regularization weights that localize the regularized ERM solution

For each geometry p the weight λ_p combines a gradient-variance term
sup_x over the per-coordinate empirical variances Δ_j(x) and a Lipschitz term,
and fixes the constrained optimizer used afterwards.
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from ..errors import InvalidParameterError, check_delta
from ..problems.base import ProblemSpec, SampleBatch
from ..utils.norms import NormName
from ..utils.rng import counter_stream

logger = logging.getLogger(__name__)

LambdaStrategy = Literal["lipschitz_envelope", "grid_sup", "exact_1d"]

GEOMETRY_ALGORITHMS = {"l2": "ada_sgd", "l1": "ada_emd", "linf": "ada_grad"}


@dataclass(frozen=True)
class GeometryRow:
    """λ_p together with its optimizer and the inputs it was computed from"""
    p: NormName
    lam: float
    algorithm: str
    lipschitz_input: float
    strategy: str
    variance_term: float

    def __post_init__(self) -> None:
        if GEOMETRY_ALGORITHMS.get(self.p) != self.algorithm:
            raise InvalidParameterError(f"geometry {self.p} must use {GEOMETRY_ALGORITHMS.get(self.p)}, not {self.algorithm}")
        if not self.lam > 0:
            raise InvalidParameterError(f"lambda must be positive, got {self.lam}")


def gradient_variances(spec: ProblemSpec, samples: SampleBatch, points: np.ndarray) -> np.ndarray:
    """Δ_j(x) = (1/n)Σ_i (g_ij(x) − ḡ_j(x))² for each row x of ``points``"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.stack([np.var(spec.subgradient(x, samples), axis=0) for x in points])


def _reduce(deltas: np.ndarray, p: NormName) -> float:
    """sup over evaluated points of √ΣΔ_j (l2), max_j √Δ_j (l1) or Σ_j √Δ_j (l∞)"""
    roots = np.sqrt(deltas)
    if p == "l2":
        per_point = np.sqrt(deltas.sum(axis=1))
    elif p == "l1":
        per_point = roots.max(axis=1)
    else:
        per_point = roots.sum(axis=1)
    return float(per_point.max())


def evaluation_points(spec: ProblemSpec, grid_size: int = 201, box: Optional[float] = None, seed: int = 0) -> np.ndarray:
    """Points for the grid strategy: a line in 1D, the origin plus seeded box points otherwise"""
    if box is None:
        box = float(spec.domain.radius) if not spec.domain.unconstrained else 4.0
    if spec.dimension == 1:
        return np.linspace(-box, box, grid_size)[:, None]
    rng = counter_stream(seed, 101)
    cloud = rng.uniform(-box, box, size=(grid_size - 1, spec.dimension))
    return spec.domain.project(np.vstack([np.zeros((1, spec.dimension)), cloud]))


def _exact_1d_points(spec: ProblemSpec, samples: SampleBatch) -> np.ndarray:
    terms = spec.piecewise_linear_terms(samples)
    if spec.dimension != 1 or terms is None:
        raise InvalidParameterError(f"exact_1d strategy needs a piecewise-linear 1D family, got {spec.name}")
    kinks = np.unique(terms.kinks)
    mids = 0.5 * (kinks[1:] + kinks[:-1])
    return np.concatenate([kinks, mids, [kinks[0] - 1.0, kinks[-1] + 1.0]])[:, None]


def variance_term(
    spec: ProblemSpec,
    samples: SampleBatch,
    p: NormName,
    strategy: LambdaStrategy = "lipschitz_envelope",
    grid_size: int = 201,
    seed: int = 0,
) -> float:
    """The sup_x Δ expression of λ_p under the chosen strategy"""
    if strategy == "lipschitz_envelope":
        # Δ_j(x) ≤ (2ℓ̂_j)² for every x
        bound = spec.lipschitz_for(p)
        if bound is None:
            raise InvalidParameterError(f"{spec.name} has no Lipschitz estimate for the {p} geometry")
        return 2.0 * bound
    if strategy == "grid_sup":
        points = evaluation_points(spec, grid_size, seed=seed)
    elif strategy == "exact_1d":
        points = _exact_1d_points(spec, samples)
    else:
        raise InvalidParameterError(f"Unknown lambda strategy: {strategy}")
    return _reduce(gradient_variances(spec, samples, points), p)


def compute_lambda(
    spec: ProblemSpec,
    samples: SampleBatch,
    p: NormName,
    delta: float,
    strategy: LambdaStrategy = "lipschitz_envelope",
    lipschitz_inflation: float = 1.0,
    grid_size: int = 201,
    seed: int = 0,
) -> float:
    """λ_p for n = len(samples) ≥ 2 samples"""
    return geometry_row(spec, samples, p, delta, strategy, lipschitz_inflation, grid_size, seed).lam


def geometry_row(
    spec: ProblemSpec,
    samples: SampleBatch,
    p: NormName,
    delta: float,
    strategy: LambdaStrategy = "lipschitz_envelope",
    lipschitz_inflation: float = 1.0,
    grid_size: int = 201,
    seed: int = 0,
) -> GeometryRow:
    check_delta(delta)
    n = len(samples)
    if n < 2:
        raise InvalidParameterError("lambda needs at least two samples")
    lipschitz = spec.lipschitz_for(p)
    if lipschitz is None:
        raise InvalidParameterError(f"{spec.name} has no Lipschitz estimate for the {p} geometry")
    lipschitz *= lipschitz_inflation
    spread = variance_term(spec, samples, p, strategy, grid_size, seed)
    if p == "l2":
        log_term = math.log(6.0 / delta)
        lam = 4.0 * math.sqrt(log_term) / math.sqrt(n) * spread + 20.0 * lipschitz * log_term / (n - 1)
    elif p == "l1":
        log_term = math.log(4.0 * spec.dimension / delta)
        lam = 4.0 * math.sqrt(2.0 * log_term) / math.sqrt(n - 1) * spread + 28.0 * lipschitz * log_term / (3.0 * (n - 1))
    else:
        log_term = math.log(30.0 / delta)
        lam = 9.0 * math.sqrt(2.0 * log_term) / (2.0 * math.sqrt(n - 1)) * spread + 50.0 * lipschitz * log_term / (n - 1)
    logger.debug(f"lambda[{p}] = {lam:.6g} (variance term {spread:.4g}, lipschitz {lipschitz:.4g}, n={n})")
    return GeometryRow(p, lam, GEOMETRY_ALGORITHMS[p], lipschitz, strategy, spread)


def lambda_grid(n: int, delta: float, ell_p: float) -> Tuple[float, int, np.ndarray]:
    """(λ⁰, K_p, grid) with λ⁰ = 7√(ln(30/δ)/(n − 1)) + 50 ln(30/δ)/(n − 1), K_p = max(1, ⌈ln ℓ_p⌉) and grid e^k λ⁰, k = 1..K_p"""
    check_delta(delta)
    if n < 2 or not ell_p > 0:
        raise InvalidParameterError("need n >= 2 and a positive Lipschitz scale")
    log_term = math.log(30.0 / delta)
    base = 7.0 * math.sqrt(log_term / (n - 1)) + 50.0 * log_term / (n - 1)
    count = max(1, math.ceil(math.log(ell_p) - 1e-12))
    return base, count, base * np.exp(np.arange(1, count + 1))
