"""
Monte-Carlo coverage checks for the concentration widths
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from ..errors import InvalidParameterError, check_delta
from ..utils.rng import counter_stream
from .widths import (
    SubGammaTail,
    TailBudget,
    bennett_width,
    dependent_sum_bound,
    empirical_bennett_from_variance,
    hoeffding_width,
    vec_inf_width,
    vec_l1_width,
    vec_l2_width,
)

logger = logging.getLogger(__name__)

CHUNK = 1000


@dataclass
class CoverageResult:
    """Observed violation frequency of one bound"""
    bound: str
    trials: int
    delta: float
    violations: int
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.violations / self.trials

    @property
    def envelope(self) -> float:
        """δ plus three binomial standard deviations"""
        return self.delta + 3.0 * math.sqrt(self.delta * (1.0 - self.delta) / self.trials)

    @property
    def within_envelope(self) -> bool:
        return self.rate <= self.envelope

    def to_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row["params"] = ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        row.update(rate=self.rate, envelope=self.envelope, within_envelope=self.within_envelope)
        return row


def _count(trials: int, seed: int, stream: int, chunk_violations: Callable[[np.random.Generator, int], int]) -> int:
    if trials < 1:
        raise InvalidParameterError("trials must be positive")
    rng = counter_stream(seed, stream)
    violations = 0
    done = 0
    while done < trials:
        size = min(CHUNK, trials - done)
        violations += int(chunk_violations(rng, size))
        done += size
    return violations


def hoeffding_coverage(trials: int = 100_000, n: int = 100, delta: float = 0.1, seed: int = 0) -> CoverageResult:
    """Bernoulli(1/2) sample means against the two-sided Hoeffding width"""
    budget = TailBudget(delta, n)
    width = hoeffding_width(1.0, budget.n, budget.delta)
    count = _count(trials, seed, 11, lambda rng, m: np.sum(np.abs(rng.binomial(n, 0.5, m) / n - 0.5) > width))
    return CoverageResult("hoeffding", trials, delta, count, {"n": n, "law": "bernoulli(0.5)"})


def bennett_coverage(trials: int = 100_000, n: int = 100, delta: float = 0.1, seed: int = 0) -> CoverageResult:
    """Bernoulli(1/2) sample means against the known-variance Bennett width"""
    width = bennett_width(0.5, 1.0, n, check_delta(delta))
    count = _count(trials, seed, 12, lambda rng, m: np.sum(np.abs(rng.binomial(n, 0.5, m) / n - 0.5) > width))
    return CoverageResult("bennett", trials, delta, count, {"n": n, "law": "bernoulli(0.5)"})


def empirical_bennett_coverage(trials: int = 100_000, n: int = 200, delta: float = 0.1, seed: int = 0) -> CoverageResult:
    """Uniform[0, 1] samples against the two-sided empirical Bennett width"""
    check_delta(delta)

    def chunk(rng: np.random.Generator, m: int) -> int:
        samples = rng.random((m, n))
        widths = empirical_bennett_from_variance(np.var(samples, axis=1, ddof=1), 1.0, n, delta, two_sided=True)
        return int(np.sum(np.abs(samples.mean(axis=1) - 0.5) > widths))

    return CoverageResult("empirical_bennett", trials, delta, _count(trials, seed, 13, chunk), {"n": n, "law": "uniform(0,1)"})


def _sphere(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    z = rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def vec_l2_coverage(trials: int = 10_000, n: int = 200, d: int = 5, delta: float = 0.1, seed: int = 0) -> CoverageResult:
    """Uniform vectors on the unit sphere (mean zero) against the l2 width"""
    def chunk(rng: np.random.Generator, m: int) -> int:
        vectors = _sphere(rng, (m, n, d))
        widths = vec_l2_width(vectors, 1.0, delta)
        return int(np.sum(np.linalg.norm(vectors.mean(axis=1), axis=1) > widths))

    return CoverageResult("vec_l2", trials, delta, _count(trials, seed, 14, chunk), {"n": n, "d": d, "law": "sphere"})


def _rademacher(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    return rng.choice(np.array([-1.0, 1.0]), size=shape)


def vec_inf_coverage(trials: int = 10_000, n: int = 200, d: int = 10, delta: float = 0.1, seed: int = 0) -> CoverageResult:
    """Rademacher coordinates against the l∞ width"""
    def chunk(rng: np.random.Generator, m: int) -> int:
        vectors = _rademacher(rng, (m, n, d))
        widths = vec_inf_width(vectors, np.ones(d), delta)
        return int(np.sum(np.max(np.abs(vectors.mean(axis=1)), axis=1) > widths))

    return CoverageResult("vec_inf", trials, delta, _count(trials, seed, 15, chunk), {"n": n, "d": d, "law": "rademacher"})


def vec_l1_coverage(trials: int = 10_000, n: int = 200, d: int = 10, delta: float = 0.1, seed: int = 0) -> CoverageResult:
    """Rademacher coordinates against the l1 width"""
    def chunk(rng: np.random.Generator, m: int) -> int:
        vectors = _rademacher(rng, (m, n, d))
        widths = vec_l1_width(vectors, np.ones(d), delta)
        return int(np.sum(np.sum(np.abs(vectors.mean(axis=1)), axis=1) > widths))

    return CoverageResult("vec_l1", trials, delta, _count(trials, seed, 16, chunk), {"n": n, "d": d, "law": "rademacher"})


def dependent_sum_coverage(trials: int = 100_000, d: int = 10, delta: float = 0.1, seed: int = 0) -> CoverageResult:
    """Fully correlated X_j = |Z|/√2 with Z standard normal.

    P(|Z|/√2 ≥ s) = 2Φ̄(√2 s) ≤ exp(−s²), so each X_j satisfies the a = 1, b = 0
    tail inequality at every level.
    """
    bound = dependent_sum_bound(SubGammaTail(1.0, 0.0, count=d), delta)
    count = _count(trials, seed, 17, lambda rng, m: np.sum(d * np.abs(rng.standard_normal(m)) / math.sqrt(2.0) > bound))
    return CoverageResult("dependent_sum", trials, delta, count, {"d": d, "law": "correlated_half_normal"})


COVERAGE_CHECKS: Dict[str, Callable[..., CoverageResult]] = {
    "hoeffding": hoeffding_coverage,
    "bennett": bennett_coverage,
    "empirical_bennett": empirical_bennett_coverage,
    "vec_l2": vec_l2_coverage,
    "vec_inf": vec_inf_coverage,
    "vec_l1": vec_l1_coverage,
    "dependent_sum": dependent_sum_coverage,
}

DEFAULT_TRIALS = {
    "hoeffding": 100_000,
    "bennett": 100_000,
    "empirical_bennett": 100_000,
    "vec_l2": 10_000,
    "vec_inf": 10_000,
    "vec_l1": 10_000,
    "dependent_sum": 100_000,
}


def coverage_suite(seed: int = 0, delta: float = 0.1, trial_scale: float = 1.0) -> List[CoverageResult]:
    """All coverage checks at their default grids, trial counts scaled by ``trial_scale``"""
    results = []
    for name, check in COVERAGE_CHECKS.items():
        trials = max(1, int(round(DEFAULT_TRIALS[name] * trial_scale)))
        result = check(trials=trials, delta=delta, seed=seed)
        logger.info(f"{name}: {result.violations}/{trials} violations (rate {result.rate:.4f}, envelope {result.envelope:.4f})")
        results.append(result)
    return results
