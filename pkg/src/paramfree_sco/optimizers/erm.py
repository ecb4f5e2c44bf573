"""
Norm-regularized empirical risk minimization: argmin (1/n)Σ f_i(x) + λ‖x‖_p
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Literal, Optional, Tuple

import numpy as np

from .. import config
from ..errors import InvalidParameterError, InvariantViolation, UnboundedObjectiveError
from ..problems.base import ProblemSpec, SampleBatch
from ..utils.norms import NormName, dual_norm_name, norm, project_ball
from ..utils.piecewise import PiecewiseLinear1D

logger = logging.getLogger(__name__)

ErmSolver = Literal["auto", "exact_1d", "generic"]

EPOCH_LENGTH = 100
# Bracket certificates count only for best points this deep inside; past EDGE the bracket doubles
INTERIOR_FRACTION = 0.5
EDGE_FRACTION = 0.75


@dataclass
class ErmSolution:
    """Regularized ERM outcome; ``solver_residual`` bounds the optimality gap"""
    lam: float
    norm: NormName
    minimizer: np.ndarray
    objective_value: float
    solver_residual: float
    tolerance: float
    solver: str
    iterations: int = 0

    @property
    def converged(self) -> bool:
        return self.solver_residual <= self.tolerance

    def require_converged(self, context: str = "") -> "ErmSolution":
        """Return self, or raise InvariantViolation when the residual exceeds the tolerance"""
        if not self.converged:
            raise InvariantViolation(
                "erm_residual_within_tolerance",
                {
                    "context": context,
                    "lam": self.lam,
                    "norm": self.norm,
                    "residual": self.solver_residual,
                    "tolerance": self.tolerance,
                    "iterations": self.iterations,
                },
            )
        return self


def regularizer_subgradient(x: np.ndarray, p: NormName) -> np.ndarray:
    """Minimum-norm element of ∂‖x‖_p (zero at the origin)"""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return np.zeros_like(x)
    if p == "l2":
        return x / np.linalg.norm(x)
    if p == "l1":
        return np.sign(x)
    peak = np.abs(x) == np.max(np.abs(x))
    return np.where(peak, np.sign(x), 0.0) / np.count_nonzero(peak)


def regularized_objective(spec: ProblemSpec, samples: SampleBatch, lam: float, p: NormName, x: np.ndarray) -> float:
    return spec.empirical_loss(x, samples) + lam * float(norm(x, p))


def default_tolerance(spec: ProblemSpec, samples: SampleBatch) -> float:
    origin = np.zeros(spec.dimension)
    return config.ERM_TOL_SCALE * (1.0 + abs(spec.empirical_loss(origin, samples)))


def regularized_erm(
    spec: ProblemSpec,
    samples: SampleBatch,
    lam: float,
    p: NormName = "l2",
    solver: ErmSolver = "auto",
    tolerance: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> ErmSolution:
    """Minimize the λ-regularized empirical risk.

    The origin is returned directly when λ dominates the dual norm of the empirical
    subgradient there. Otherwise ``exact_1d`` scans breakpoints of one-dimensional
    piecewise-linear objectives and ``generic`` runs restarted projected subgradient
    descent, finishing one-dimensional piecewise-linear runs at the exact minimizing
    breakpoint; ``auto`` picks exact_1d whenever the family supports it.
    """
    if not lam > 0:
        raise InvalidParameterError(f"lambda must be positive, got {lam}")
    tol = default_tolerance(spec, samples) if tolerance is None else float(tolerance)
    budget = config.ERM_MAX_ITER if max_iter is None else int(max_iter)
    origin = np.zeros(spec.dimension)

    g0 = spec.empirical_subgradient(origin, samples)
    if float(norm(g0, dual_norm_name(p))) <= lam:
        value = regularized_objective(spec, samples, lam, p, origin)
        return ErmSolution(lam, p, origin, value, 0.0, tol, "origin")

    terms = spec.piecewise_linear_terms(samples) if spec.dimension == 1 and spec.domain.unconstrained else None
    if solver == "exact_1d" and terms is None:
        raise InvalidParameterError(f"exact_1d needs an unconstrained piecewise-linear 1D family, got {spec.name}")
    if solver in ("auto", "exact_1d") and terms is not None:
        x_hat, _ = terms.with_abs_term(lam).minimize()
        minimizer = np.array([x_hat])
        value = regularized_objective(spec, samples, lam, p, minimizer)
        return ErmSolution(lam, p, minimizer, value, 0.0, tol, "exact_1d")

    solution = _restarted_subgradient(spec, samples, lam, p, tol, budget)
    return solution if terms is None else _snap_to_kinks(solution, spec, samples, terms)


def _restarted_subgradient(
    spec: ProblemSpec,
    samples: SampleBatch,
    lam: float,
    p: NormName,
    tol: float,
    budget: int,
) -> ErmSolution:
    """Normalized subgradient epochs inside a Euclidean bracket that halves or doubles.

    Each epoch lower-bounds the objective over its bracket from the subgradient cuts
    it collected. That gap only certifies the best point when the point sits well
    inside the bracket; otherwise the bracket is recentred and, near its edge, doubled.
    Without a certificate the residual is reported as infinite.
    """
    def oracle(x: np.ndarray) -> Tuple[float, np.ndarray]:
        value = regularized_objective(spec, samples, lam, p, x)
        grad = spec.empirical_subgradient(x, samples) + lam * regularizer_subgradient(x, p)
        return value, grad

    center = np.zeros(spec.dimension)
    best_x, best_f = center.copy(), regularized_objective(spec, samples, lam, p, center)
    radius = 1.0
    gap = math.inf
    certified = False
    iterations = 0

    while iterations < budget:
        x = center.copy()
        running = np.zeros_like(x)
        cut_values, cut_slopes, cut_points = [], [], []
        steps = min(EPOCH_LENGTH, budget - iterations)
        for k in range(1, steps + 1):
            value, grad = oracle(x)
            iterations += 1
            if value < best_f:
                best_x, best_f = x.copy(), value
            length = float(np.linalg.norm(grad))
            if length == 0.0:
                # 0 ∈ ∂F(x): a global minimizer
                return ErmSolution(lam, p, x, value, 0.0, tol, "generic", iterations)
            cut_values.append(value)
            cut_slopes.append(grad)
            cut_points.append(x.copy())
            x = center + project_ball(x - (radius / math.sqrt(k)) * grad / length - center, radius, "l2")
            x = spec.domain.project(x)
            running += x
        average = running / steps
        average_f = regularized_objective(spec, samples, lam, p, average)
        if average_f < best_f:
            best_x, best_f = average, average_f

        gap = best_f - _bracket_lower_bound(
            np.array(cut_values), np.array(cut_slopes), np.array(cut_points), center, radius
        )
        offset = float(np.linalg.norm(best_x - center))
        if gap <= tol and offset <= INTERIOR_FRACTION * radius:
            certified = True
            break
        if offset >= EDGE_FRACTION * radius:
            radius *= 2.0
        elif gap > tol:
            radius *= 0.5
        center = best_x.copy()

    residual = float(gap) if certified else math.inf
    if not certified:
        logger.warning(
            f"ERM budget of {budget} iterations exhausted without a certificate "
            f"(last bracket gap {gap:.3g}, tolerance {tol:.3g}, bracket radius {radius:.3g})"
        )
    return ErmSolution(lam, p, best_x, best_f, residual, tol, "generic", iterations)


def _snap_to_kinks(
    solution: ErmSolution, spec: ProblemSpec, samples: SampleBatch, terms: PiecewiseLinear1D
) -> ErmSolution:
    """Finish a one-dimensional piecewise-linear run at the exact minimizing breakpoint"""
    try:
        x_hat, _ = terms.with_abs_term(solution.lam).descend_from(float(solution.minimizer[0]))
    except UnboundedObjectiveError:
        return solution
    minimizer = np.array([x_hat])
    value = regularized_objective(spec, samples, solution.lam, solution.norm, minimizer)
    return replace(solution, minimizer=minimizer, objective_value=value, solver_residual=0.0)


def _bracket_lower_bound(
    values: np.ndarray, slopes: np.ndarray, points: np.ndarray, center: np.ndarray, radius: float
) -> float:
    """max of single-cut and normalized-average-cut minima over the ball B(center, radius)"""
    offsets = values + np.einsum("kd,kd->k", slopes, center - points)
    lengths = np.linalg.norm(slopes, axis=1)
    single = float(np.max(offsets - radius * lengths))
    weights = 1.0 / lengths
    weights /= weights.sum()
    averaged = float(weights @ offsets - radius * np.linalg.norm(weights @ slopes))
    return max(single, averaged)
