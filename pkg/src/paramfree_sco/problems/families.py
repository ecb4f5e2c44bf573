"""
Synthetic problem families with exact population oracles
"""

import logging
import math
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Type

import numpy as np

from ..errors import ConfigError, InvalidParameterError
from ..utils.piecewise import PiecewiseLinear1D
from .base import DomainConstraint, PopulationOracle, ProblemSpec, SampleBatch

logger = logging.getLogger(__name__)


def _rows(x: np.ndarray) -> np.ndarray:
    return np.atleast_2d(np.asarray(x, dtype=float))


def _pop(fn: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    """Lift a row-wise population loss so it accepts a single point too"""
    def wrapped(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = fn(_rows(x))
        return out[0] if x.ndim <= 1 else out
    return wrapped


def _min_norm_kink(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum-magnitude element of [b − a, b + a]"""
    return np.sign(b) * np.maximum(np.abs(b) - a, 0.0)


class AbsLinearAdversarial(ProblemSpec):
    """f(x; 0) = |x − c|, f(x; 1) = −(x − c) with S ~ Bernoulli(q), q = 1/2 − 1/(16√n).

    With c = 0 this is the instance on which greedy selection over step sizes
    fails; c = 1 moves the optimum so that D* = 1.
    """

    name = "abs_linear_adversarial"
    PARAM_TYPES = {"n": int, "shift": float}

    def __init__(self, n: int = 3000, shift: float = 0.0):
        if n < 1:
            raise InvalidParameterError(f"n must be positive, got {n}")
        super().__init__(1, lipschitz_l2=1.0, lipschitz_coord=np.ones(1))
        self.n = int(n)
        self.shift = float(shift)
        self.q = 0.5 - 1.0 / (16.0 * math.sqrt(self.n))
        q, c = self.q, self.shift
        self.oracle = PopulationOracle(
            pop_loss=_pop(lambda X: (1 - q) * np.abs(X[:, 0] - c) - q * (X[:, 0] - c)),
            f_star=0.0,
            minimizer=np.array([c]),
        )

    def params(self) -> Dict[str, Any]:
        return {"n": self.n, "shift": self.shift, "q": self.q}

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return (rng.random(n) < self.q).astype(np.int8)

    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        y = points[:, 0] - self.shift
        return np.where(values == 1, -y, np.abs(y))

    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        y = points[:, 0] - self.shift
        return np.where(values == 1, -1.0, np.sign(y))[:, None]

    def piecewise_linear_terms(self, batch: SampleBatch) -> Optional[PiecewiseLinear1D]:
        ones = batch.values == 1
        return PiecewiseLinear1D.from_terms(
            a=np.where(ones, 0.0, 1.0),
            c=self.shift,
            b=np.where(ones, -1.0, 0.0),
            e=np.where(ones, self.shift, 0.0),
        ).compact()


class StronglyConvex1D(ProblemSpec):
    """f(x; S) = (μ/2)(x − S)² with S uniform on [x* − w, x* + w], on the interval [−B, B]"""

    name = "strongly_convex_1d"
    PARAM_TYPES = {"mu": float, "optimum": float, "width": float, "radius": float}

    def __init__(self, mu: float = 1.0, optimum: float = 1.0, width: float = 0.5, radius: float = 1.25):
        if mu <= 0 or width < 0 or radius <= abs(optimum):
            raise InvalidParameterError("need mu > 0, width >= 0 and radius > |optimum|")
        lip = mu * (radius + abs(optimum) + width)
        super().__init__(1, DomainConstraint("l2", radius), lipschitz_l2=lip, lipschitz_coord=np.array([lip]))
        self.mu, self.optimum, self.width, self.radius = float(mu), float(optimum), float(width), float(radius)
        variance = self.width ** 2 / 3.0
        self.oracle = PopulationOracle(
            pop_loss=_pop(lambda X: 0.5 * self.mu * ((X[:, 0] - self.optimum) ** 2 + variance)),
            f_star=0.5 * self.mu * variance,
            minimizer=np.array([self.optimum]),
        )

    def params(self) -> Dict[str, Any]:
        return {"mu": self.mu, "optimum": self.optimum, "width": self.width, "radius": self.radius}

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.optimum - self.width, self.optimum + self.width, size=n)

    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        return 0.5 * self.mu * (points[:, 0] - values) ** 2

    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        return (self.mu * (points[:, 0] - values))[:, None]


class EuclideanHingeLike(ProblemSpec):
    """f(x; z) = ‖x − x*‖₂ + σ⟨z, x⟩ with z uniform on the unit sphere"""

    name = "euclidean_hinge_like"
    PARAM_TYPES = {"dimension": int, "distance": float, "noise": float}

    def __init__(self, dimension: int = 10, distance: float = 1.0, noise: float = 0.5):
        if not 0 <= noise <= 1:
            raise InvalidParameterError("noise must lie in [0, 1]")
        lip = 1.0 + noise
        super().__init__(dimension, lipschitz_l2=lip, lipschitz_coord=np.full(dimension, lip))
        self.distance, self.noise = float(distance), float(noise)
        self.optimum = np.zeros(dimension)
        self.optimum[0] = self.distance
        self.oracle = PopulationOracle(
            pop_loss=_pop(lambda X: np.linalg.norm(X - self.optimum, axis=1)),
            f_star=0.0,
            minimizer=self.optimum.copy(),
        )

    def params(self) -> Dict[str, Any]:
        return {"distance": self.distance, "noise": self.noise}

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal((n, self.dimension))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points - self.optimum, axis=1) + self.noise * np.sum(values * points, axis=1)

    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        diff = points - self.optimum
        length = np.linalg.norm(diff, axis=1, keepdims=True)
        unit = np.divide(diff, length, out=np.zeros_like(diff), where=length > 0)
        grads = unit + self.noise * values
        # At the optimum the unit ball absorbs the noise term (noise ≤ 1)
        return np.where(length > 0, grads, 0.0)


class SeparableAbsFamily(ProblemSpec):
    """f(x; z) = Σ_j c_j (w|x_j − x*_j| + σ z_j (x_j − x*_j)) with Rademacher z"""

    name = "separable_abs"

    def __init__(self, optimum: np.ndarray, coord_weights: np.ndarray, sharpness: float = 0.5, noise: float = 0.5):
        optimum = np.asarray(optimum, dtype=float)
        weights = np.asarray(coord_weights, dtype=float)
        if optimum.shape != weights.shape or np.any(weights < 0):
            raise InvalidParameterError("optimum and nonnegative coordinate weights must share a shape")
        ell = weights * (sharpness + noise)
        super().__init__(optimum.size, lipschitz_l2=float(np.linalg.norm(ell)), lipschitz_coord=ell)
        self.optimum, self.coord_weights = optimum, weights
        self.sharpness, self.noise = float(sharpness), float(noise)
        self.oracle = PopulationOracle(
            pop_loss=_pop(lambda X: self.sharpness * np.abs(X - self.optimum) @ self.coord_weights),
            f_star=0.0,
            minimizer=self.optimum.copy(),
        )

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.choice(np.array([-1.0, 1.0]), size=(n, self.dimension))

    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        diff = points - self.optimum
        return (self.sharpness * np.abs(diff) + self.noise * values * diff) @ self.coord_weights

    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        diff = points - self.optimum
        linear = self.noise * values
        grads = np.where(diff != 0, self.sharpness * np.sign(diff) + linear, _min_norm_kink(self.sharpness, linear))
        return grads * self.coord_weights


class SparseOptimumL1(SeparableAbsFamily):
    """Uniform coordinates, optimum at distance·e₁: favours the l1 geometry"""

    name = "sparse_optimum_l1_geometry"
    PARAM_TYPES = {"dimension": int, "distance": float, "sharpness": float, "noise": float}

    def __init__(self, dimension: int = 50, distance: float = 1.0, sharpness: float = 0.5, noise: float = 0.5):
        optimum = np.zeros(dimension)
        optimum[0] = distance
        super().__init__(optimum, np.ones(dimension), sharpness, noise)
        self.distance = float(distance)

    def params(self) -> Dict[str, Any]:
        return {"distance": self.distance, "sharpness": self.sharpness, "noise": self.noise}


class DenseOptimumLinf(SeparableAbsFamily):
    """Optimum distance·1⃗ with coordinate weights ∝ j^(−decay) summing to one: favours l∞"""

    name = "dense_optimum_linf_geometry"
    PARAM_TYPES = {"dimension": int, "distance": float, "decay": float, "sharpness": float, "noise": float}

    def __init__(
        self,
        dimension: int = 50,
        distance: float = 1.0,
        decay: float = 1.0,
        sharpness: float = 0.5,
        noise: float = 0.5,
    ):
        weights = np.arange(1, dimension + 1, dtype=float) ** (-decay)
        super().__init__(np.full(dimension, float(distance)), weights / weights.sum(), sharpness, noise)
        self.distance, self.decay = float(distance), float(decay)

    def params(self) -> Dict[str, Any]:
        return {"distance": self.distance, "decay": self.decay, "sharpness": self.sharpness, "noise": self.noise}


class PiecewiseLinearFamily(ProblemSpec):
    """f(x; k) = a_k|x − c_k| + b_k x with sample type k drawn with probability π_k"""

    name = "piecewise_linear_1d"
    PARAM_TYPES = {"a": tuple, "c": tuple, "b": tuple, "weights": tuple}

    def __init__(
        self,
        a: Sequence[float] = (1.0, 0.5),
        c: Sequence[float] = (1.0, -0.5),
        b: Sequence[float] = (0.2, -0.2),
        weights: Optional[Sequence[float]] = None,
    ):
        self.a = np.asarray(a, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.b = np.asarray(b, dtype=float)
        probs = np.ones_like(self.a) if weights is None else np.asarray(weights, dtype=float)
        if not (self.a.shape == self.c.shape == self.b.shape == probs.shape):
            raise InvalidParameterError("a, c, b and weights must have equal length")
        if np.any(self.a < 0) or np.any(probs < 0) or probs.sum() <= 0:
            raise InvalidParameterError("a and weights must be nonnegative")
        self.probs = probs / probs.sum()
        lip = float(np.max(self.a + np.abs(self.b)))
        super().__init__(1, lipschitz_l2=lip, lipschitz_coord=np.array([lip]))
        population = PiecewiseLinear1D.from_terms(self.a, self.c, self.b, weights=self.probs)
        x_star, f_star = population.minimize()
        self.oracle = PopulationOracle(
            pop_loss=_pop(lambda X: population.value(X[:, 0])),
            f_star=f_star,
            minimizer=np.array([x_star]),
        )

    def params(self) -> Dict[str, Any]:
        return {"a": self.a.tolist(), "c": self.c.tolist(), "b": self.b.tolist(), "weights": self.probs.tolist()}

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.choice(self.a.size, size=n, p=self.probs)

    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        x = points[:, 0]
        return self.a[values] * np.abs(x - self.c[values]) + self.b[values] * x

    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        diff = points[:, 0] - self.c[values]
        a, b = self.a[values], self.b[values]
        return np.where(diff != 0, a * np.sign(diff) + b, _min_norm_kink(a, b))[:, None]

    def piecewise_linear_terms(self, batch: SampleBatch) -> Optional[PiecewiseLinear1D]:
        k = batch.values
        return PiecewiseLinear1D.from_terms(self.a[k], self.c[k], self.b[k]).compact()


def _registry() -> Dict[str, Type[ProblemSpec]]:
    from .logistic import MulticlassLogistic

    return {
        cls.name: cls
        for cls in (
            AbsLinearAdversarial,
            StronglyConvex1D,
            EuclideanHingeLike,
            SparseOptimumL1,
            DenseOptimumLinf,
            PiecewiseLinearFamily,
            MulticlassLogistic,
        )
    }


def family_names() -> Tuple[str, ...]:
    return tuple(sorted(_registry()))


def _coerce(kind: type, raw: Any) -> Any:
    if kind is tuple:
        if isinstance(raw, str):
            return tuple(float(v) for v in raw.split(",") if v.strip())
        return tuple(float(v) for v in raw)
    if kind is int:
        return int(float(raw))
    return kind(raw)


def build_family(name: str, **params: Any) -> ProblemSpec:
    """Instantiate a family by name; string parameter values are coerced"""
    registry = _registry()
    if name not in registry:
        raise ConfigError(f"Unknown family '{name}'. Known: {', '.join(sorted(registry))}")
    cls = registry[name]
    kinds: Dict[str, type] = getattr(cls, "PARAM_TYPES", {})
    unknown = set(params) - set(kinds)
    if unknown:
        raise ConfigError(f"Unknown parameters for {name}: {sorted(unknown)}")
    try:
        kwargs = {key: _coerce(kinds[key], value) for key, value in params.items()}
        spec = cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid parameters for {name}: {e}") from e
    logger.debug(f"Built family {name} with {kwargs}")
    return spec
