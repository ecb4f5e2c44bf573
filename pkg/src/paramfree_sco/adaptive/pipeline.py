"""
Distance-adaptive two-stage optimization and its model-selection variants

Stage 1 localizes with regularized ERM on the first half of the samples; stage 2
runs the geometry's adaptive optimizer on the fresh second half inside the ball
of radius three times the ERM solution's norm.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import InvalidParameterError, InvariantViolation, check_delta
from ..optimizers.adaptive_methods import GEOMETRY_METHODS
from ..optimizers.erm import ErmSolution, ErmSolver, regularized_erm
from ..problems.base import ProblemSpec, SampleBatch
from ..selection.loss_matrix import LossMatrix
from ..selection.selectors import SelectionOutcome, reliable_select
from ..selection.widths import widths_multi_geometry, widths_theory
from ..utils.norms import NormName, norm
from .regularization import GeometryRow, LambdaStrategy, geometry_row, lambda_grid

logger = logging.getLogger(__name__)

GEOMETRIES: Tuple[NormName, ...] = ("l2", "l1", "linf")


@dataclass
class AdaptiveResult:
    """Output of the two-stage method with everything needed to audit it"""
    output: np.ndarray
    stage1_radius: float
    erm: ErmSolution
    geometry: GeometryRow
    sample_split: Tuple[np.ndarray, np.ndarray]
    nominal_failure: float = 0.0

    def __post_init__(self) -> None:
        size = float(norm(self.output, self.geometry.p))
        if size > self.stage1_radius + 1e-9:
            raise InvariantViolation(
                "output_in_ball", {"norm": size, "radius": self.stage1_radius, "geometry": self.geometry.p}
            )

    @property
    def flags(self) -> List[str]:
        return [] if self.erm.converged else ["erm_residual_above_tolerance"]


@dataclass
class SelectedResult:
    """Reliable selection over adaptive candidates; candidate 0 is the origin"""
    outcome: SelectionOutcome
    candidates: List[AdaptiveResult]
    points: np.ndarray
    lambdas: List[float] = field(default_factory=list)

    @property
    def output(self) -> np.ndarray:
        return self.points[self.outcome.chosen]

    @property
    def chosen_result(self) -> Optional[AdaptiveResult]:
        k = self.outcome.chosen
        return None if k == 0 else self.candidates[k - 1]


def assert_disjoint(*batches: SampleBatch) -> None:
    """Raise InvariantViolation if any two stages share a sample id"""
    seen: set = set()
    for stage, batch in enumerate(batches):
        ids = batch.id_set()
        shared = seen & ids
        if shared:
            raise InvariantViolation("disjoint_sample_stages", {"stage": stage, "shared": len(shared)})
        seen |= ids


def _split(samples: SampleBatch, parts: int) -> Tuple[SampleBatch, ...]:
    if len(samples) % parts or len(samples) < 2 * parts:
        raise InvalidParameterError(f"need a multiple of {parts} samples (at least {2 * parts}), got {len(samples)}")
    size = len(samples) // parts
    batches = samples.split(*([size] * parts))
    assert_disjoint(*batches)
    return batches


def optimal_adaptive(
    spec: ProblemSpec,
    samples: SampleBatch,
    p: NormName,
    delta: float,
    lambda_strategy: LambdaStrategy = "lipschitz_envelope",
    erm_solver: ErmSolver = "auto",
    erm_max_iter: Optional[int] = None,
    lam: Optional[float] = None,
    lipschitz_inflation: float = 1.0,
    strict_erm: bool = False,
) -> AdaptiveResult:
    """Two-stage method on 2n samples; ``lam`` overrides the computed λ_p.

    An uncertified stage-1 ERM is flagged on the result, or raises InvariantViolation
    when ``strict_erm`` is set.
    """
    check_delta(delta)
    first, second = _split(samples, 2)
    row = geometry_row(spec, first, p, delta, lambda_strategy, lipschitz_inflation)
    if lam is not None:
        row = GeometryRow(p, float(lam), row.algorithm, row.lipschitz_input, "fixed", row.variance_term)
    erm = regularized_erm(spec, first, row.lam, p, solver=erm_solver, max_iter=erm_max_iter)
    if strict_erm:
        erm.require_converged(f"{spec.name} ({p})")
    radius = 3.0 * float(norm(erm.minimizer, p))
    if radius == 0.0:
        output = np.zeros(spec.dimension)
    else:
        output = GEOMETRY_METHODS[p](spec, radius, second).average_iterate
    if not erm.converged:
        logger.warning(f"ERM residual {erm.solver_residual:.3g} above tolerance for {spec.name} ({p})")
    return AdaptiveResult(output, radius, erm, row, (first.ids.copy(), second.ids.copy()), 3.0 * delta)


def lambda_grid_adaptive(
    spec: ProblemSpec,
    samples: SampleBatch,
    p: NormName,
    delta: float,
    gamma: float = 3.0,
    erm_solver: ErmSolver = "auto",
    erm_max_iter: Optional[int] = None,
    strict_erm: bool = False,
) -> SelectedResult:
    """Grid search over λ with reliable selection on held-out samples.

    ``samples`` holds 3n ids: 2n for the two-stage runs and n for validation.
    """
    train_a, train_b, validation = _split(samples, 3)
    train = SampleBatch(np.concatenate([train_a.ids, train_b.ids]), np.concatenate([train_a.values, train_b.values]))
    scale = spec.lipschitz_for(p)
    if scale is None:
        raise InvalidParameterError(f"{spec.name} has no Lipschitz estimate for the {p} geometry")
    _, count, grid = lambda_grid(len(train_a), delta, scale)
    candidates = [
        optimal_adaptive(
            spec, train, p, delta, erm_solver=erm_solver, erm_max_iter=erm_max_iter,
            lam=float(lam), strict_erm=strict_erm,
        )
        for lam in grid
    ]
    points = np.vstack([np.zeros(spec.dimension)] + [c.output for c in candidates])
    losses = LossMatrix.from_problem(spec, points, validation)
    widths = widths_theory(losses, scale, norm(points, p, axis=1), delta)
    outcome = reliable_select(losses, widths, gamma)
    logger.info(f"lambda grid of {count} for {spec.name} ({p}): chose candidate {outcome.chosen}")
    return SelectedResult(outcome, candidates, points, [float(v) for v in grid])


def multi_geometry(
    spec: ProblemSpec,
    samples: SampleBatch,
    delta: float,
    gamma: float = 3.0,
    lambda_strategy: LambdaStrategy = "lipschitz_envelope",
    erm_solver: ErmSolver = "auto",
    erm_max_iter: Optional[int] = None,
    geometries: Sequence[NormName] = GEOMETRIES,
    strict_erm: bool = False,
) -> SelectedResult:
    """Run the two-stage method in each geometry on 2n samples and select among them on n more"""
    lipschitz = [spec.lipschitz_for(p) for p in GEOMETRIES]
    if any(v is None for v in lipschitz):
        raise InvalidParameterError(f"{spec.name} lacks one of the three Lipschitz estimates")
    train_a, train_b, validation = _split(samples, 3)
    train = SampleBatch(np.concatenate([train_a.ids, train_b.ids]), np.concatenate([train_a.values, train_b.values]))
    candidates = [
        optimal_adaptive(spec, train, p, delta, lambda_strategy, erm_solver, erm_max_iter, strict_erm=strict_erm)
        for p in geometries
    ]
    points = np.vstack([np.zeros(spec.dimension)] + [c.output for c in candidates])
    losses = LossMatrix.from_problem(spec, points, validation)
    widths = widths_multi_geometry(losses, points, lipschitz, delta)  # type: ignore[arg-type]
    outcome = reliable_select(losses, widths, gamma)
    logger.info(f"multi-geometry for {spec.name}: chose candidate {outcome.chosen}")
    return SelectedResult(outcome, candidates, points, [c.geometry.lam for c in candidates])
