"""
Stochastic convex problem abstraction: domains, sample batches and population oracles
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from ..errors import InvalidParameterError, OracleUnavailableError
from ..utils.norms import NormName, norm, project_ball
from ..utils.piecewise import PiecewiseLinear1D
from ..utils.rng import counter_stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DomainConstraint:
    """Feasible set 𝒳: all of ℝ^d, or a p-norm ball of given radius around the origin"""
    norm: Optional[NormName] = None
    radius: Optional[float] = None

    @property
    def unconstrained(self) -> bool:
        return self.norm is None or self.radius is None

    def project(self, x: np.ndarray) -> np.ndarray:
        if self.unconstrained:
            return np.asarray(x, dtype=float)
        return project_ball(x, self.radius, self.norm)  # type: ignore[arg-type]

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        if self.unconstrained:
            return True
        return bool(np.all(norm(x, self.norm) <= self.radius + tol))  # type: ignore[arg-type, operator]


@dataclass(frozen=True)
class SampleBatch:
    """Ordered sample identifiers with their drawn payloads.

    ``ids`` are positions in the generating stream and identify samples across
    splits; ``values`` holds the family-specific draw for each id.
    """
    ids: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.values):
            raise InvalidParameterError("ids and values must have equal length")

    def __len__(self) -> int:
        return int(len(self.ids))

    def __getitem__(self, item: slice) -> "SampleBatch":
        return SampleBatch(self.ids[item], self.values[item])

    def split(self, *sizes: int) -> Tuple["SampleBatch", ...]:
        """Consecutive disjoint sub-batches of the given sizes"""
        if sum(sizes) > len(self):
            raise InvalidParameterError(f"Cannot split {len(self)} samples into {sizes}")
        parts = []
        start = 0
        for size in sizes:
            parts.append(self[start:start + size])
            start += size
        return tuple(parts)

    def id_set(self) -> frozenset:
        return frozenset(int(i) for i in self.ids)


@dataclass(frozen=True)
class PopulationOracle:
    """Exact population quantities of a synthetic family"""
    pop_loss: Callable[[np.ndarray], np.ndarray]
    f_star: float
    minimizer: np.ndarray

    def d_star(self, p: NormName = "l2") -> float:
        return float(norm(self.minimizer, p))

    def suboptimality(self, x: np.ndarray) -> np.ndarray:
        """F(x) − F* for one point or a stack of points (rows)"""
        return np.maximum(np.asarray(self.pop_loss(np.asarray(x, dtype=float))) - self.f_star, 0.0)


class ProblemSpec(ABC):
    """A sampleable stochastic convex objective f(x; S).

    Subclasses implement the sample law and row-wise loss/subgradient
    evaluation; everything else is derived here.
    """

    name: str = "problem"

    def __init__(
        self,
        dimension: int,
        domain: Optional[DomainConstraint] = None,
        lipschitz_l2: Optional[float] = None,
        lipschitz_coord: Optional[np.ndarray] = None,
    ):
        if dimension < 1:
            raise InvalidParameterError(f"dimension must be positive, got {dimension}")
        self.dimension = int(dimension)
        self.domain = domain or DomainConstraint()
        self.lipschitz_l2 = lipschitz_l2
        self.lipschitz_coord = None if lipschitz_coord is None else np.asarray(lipschitz_coord, dtype=float)
        self.oracle: Optional[PopulationOracle] = None

    # Family-specific pieces

    @abstractmethod
    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n i.i.d. sample payloads"""

    @abstractmethod
    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        """f(points[b]; values[b]) for each row b"""

    @abstractmethod
    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        """Minimum-norm subgradient of f(·; values[b]) at points[b], shape (B, d)"""

    def params(self) -> Dict[str, Any]:
        return {}

    def piecewise_linear_terms(self, batch: SampleBatch) -> Optional[PiecewiseLinear1D]:
        """Empirical objective as exact 1D terms, when the family admits them"""
        return None

    # Derived evaluation

    def _broadcast(self, x: np.ndarray, n: int) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dimension:
            raise InvalidParameterError(f"Point has {x.size} coordinates, expected {self.dimension}")
        return np.broadcast_to(x, (n, self.dimension))

    def loss(self, x: np.ndarray, batch: SampleBatch) -> np.ndarray:
        return self.loss_rows(self._broadcast(x, len(batch)), batch.values)

    def subgradient(self, x: np.ndarray, batch: SampleBatch) -> np.ndarray:
        return self.subgradient_rows(self._broadcast(x, len(batch)), batch.values)

    def empirical_loss(self, x: np.ndarray, batch: SampleBatch) -> float:
        return float(np.mean(self.loss(x, batch)))

    def empirical_subgradient(self, x: np.ndarray, batch: SampleBatch) -> np.ndarray:
        return np.mean(self.subgradient(x, batch), axis=0)

    def loss_columns(self, points: np.ndarray, batch: SampleBatch) -> np.ndarray:
        """Per-sample losses of each candidate point: shape (n, number of points)"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.column_stack([self.loss(p, batch) for p in points])

    def lipschitz_for(self, p: NormName) -> Optional[float]:
        """Gradient bound in the dual of ``p``: L for l2, ‖ℓ‖∞ for l1, ‖ℓ‖₁ for l∞"""
        if p == "l2":
            return self.lipschitz_l2
        if self.lipschitz_coord is None:
            return None
        return float(np.max(self.lipschitz_coord) if p == "l1" else np.sum(self.lipschitz_coord))

    def describe(self) -> Dict[str, Any]:
        return {"family": self.name, "dimension": self.dimension, **self.params()}


def sample_batch(spec: ProblemSpec, n: int, seed: int, *keys: int) -> SampleBatch:
    """Draw n samples from the counter stream keyed by (seed, *keys); no keys means stream 0"""
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    rng = counter_stream(seed, *(keys or (0,)))
    values = spec.draw(rng, n)
    return SampleBatch(np.arange(n, dtype=np.int64), values)


def population_suboptimality(spec_or_oracle: Any, x: np.ndarray) -> float:
    """F(x) − F* from a spec's oracle (or an oracle directly)"""
    oracle = spec_or_oracle if isinstance(spec_or_oracle, PopulationOracle) else getattr(spec_or_oracle, "oracle", None)
    if oracle is None:
        name = getattr(spec_or_oracle, "name", type(spec_or_oracle).__name__)
        raise OracleUnavailableError(f"No population oracle for {name}")
    return float(np.asarray(oracle.suboptimality(np.asarray(x, dtype=float))).reshape(-1)[0])


def audit_lipschitz(spec: ProblemSpec, trials: int = 1000, seed: int = 0, box: float = 3.0) -> Dict[str, float]:
    """Largest observed excess of ‖g‖₂ over L and |g_j| over ℓ_j at random in-domain points"""
    rng = counter_stream(seed, 1)
    points = spec.domain.project(rng.uniform(-box, box, size=(trials, spec.dimension)))
    values = spec.draw(counter_stream(seed, 2), trials)
    grads = spec.subgradient_rows(points, values)
    report = {"l2_excess": float("nan"), "coord_excess": float("nan")}
    if spec.lipschitz_l2 is not None:
        report["l2_excess"] = float(np.max(np.linalg.norm(grads, axis=1) - spec.lipschitz_l2))
    if spec.lipschitz_coord is not None:
        report["coord_excess"] = float(np.max(np.abs(grads) - spec.lipschitz_coord))
    return report


def audit_convexity(spec: ProblemSpec, trials: int = 1000, seed: int = 0, box: float = 3.0) -> float:
    """Largest midpoint-convexity violation f(mid) − (f(a) + f(b))/2 along random segments"""
    rng = counter_stream(seed, 3)
    a = spec.domain.project(rng.uniform(-box, box, size=(trials, spec.dimension)))
    b = spec.domain.project(rng.uniform(-box, box, size=(trials, spec.dimension)))
    values = spec.draw(counter_stream(seed, 4), trials)
    mid = spec.loss_rows(0.5 * (a + b), values)
    ends = 0.5 * (spec.loss_rows(a, values) + spec.loss_rows(b, values))
    return float(np.max(mid - ends))
