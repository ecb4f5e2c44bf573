"""
Ball-constrained adaptive first-order methods: AdaSGD, AdaEMD and AdaGrad

Every method has a batched core that advances B independent runs in lockstep
(one radius and one sample stream per row) and a single-run wrapper returning
an OptimizerRun. Runs start at the origin, take one sample per step and return
the uniform average of u_1..u_n.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from ..errors import InvalidParameterError
from ..problems.base import ProblemSpec, SampleBatch
from ..utils.norms import NormName, norm, project_ball

logger = logging.getLogger(__name__)

EmdStepRule = Literal["log_dim", "radius"]

# One entry per step: (iterates, gradient norms, accumulators), each with a leading row axis
StepTrace = List[Tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass
class OptimizerRun:
    """Outcome of one optimizer run"""
    method: str
    radius: float
    norm: NormName
    iterate_count: int
    average_iterate: np.ndarray
    seed: Optional[int] = None
    trace: Optional[np.ndarray] = None
    grad_norms: Optional[np.ndarray] = None
    accumulators: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        size = float(norm(self.average_iterate, self.norm))
        if size > self.radius + 1e-9:
            raise InvalidParameterError(
                f"{self.method} average has {self.norm} norm {size} above radius {self.radius}"
            )

    def to_trace_rows(self) -> List[Dict[str, Any]]:
        """Rows of (step, coordinates, gradient norm) for CSV dumps"""
        if self.trace is None:
            return []
        rows = []
        for t, point in enumerate(self.trace, start=1):
            row: Dict[str, Any] = {"step": t}
            row.update({f"x{j}": float(v) for j, v in enumerate(point)})
            if self.grad_norms is not None:
                row["grad_norm"] = float(self.grad_norms[t - 1])
            rows.append(row)
        return rows


def _prepare(
    spec: ProblemSpec, radius: Union[float, np.ndarray], values: np.ndarray, p: NormName
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row radii of {x ∈ 𝒳 : ‖x‖_p ≤ R} and per-row sample streams of shape (B, n, ...)"""
    radii = np.atleast_1d(np.asarray(radius, dtype=float))
    if np.any(radii <= 0):
        raise InvalidParameterError(f"radius must be positive, got {radius}")
    streams = np.asarray(values)
    rows = max(radii.size, streams.shape[0])
    if radii.size not in (1, rows) or streams.shape[0] not in (1, rows):
        raise InvalidParameterError(f"{radii.size} radii do not match {streams.shape[0]} sample streams")
    if streams.ndim < 2 or streams.shape[1] < 1:
        raise InvalidParameterError("at least one sample per stream is required")
    radii = np.broadcast_to(radii, (rows,)).astype(float)
    streams = np.broadcast_to(streams, (rows,) + streams.shape[1:])
    domain = spec.domain
    if not domain.unconstrained:
        if domain.norm != p and spec.dimension > 1:
            raise InvalidParameterError(
                f"Cannot intersect a {p} ball with a {domain.norm} domain in {spec.dimension} dimensions"
            )
        radii = np.minimum(radii, float(domain.radius))  # type: ignore[arg-type]
    return radii, streams


def ada_sgd_batch(
    spec: ProblemSpec,
    radius: Union[float, np.ndarray],
    values: np.ndarray,
    trace: Optional[StepTrace] = None,
) -> np.ndarray:
    """Projected SGD with step R/√(Σ‖g‖₂²) for each row; returns averages of shape (B, d)"""
    radii, streams = _prepare(spec, radius, values, "l2")
    rows, n = streams.shape[:2]
    u = np.zeros((rows, spec.dimension))
    total = np.zeros_like(u)
    accumulated = np.zeros(rows)
    for t in range(n):
        total += u
        g = spec.subgradient_rows(u, streams[:, t])
        accumulated += np.einsum("bd,bd->b", g, g)
        if trace is not None:
            trace.append((u.copy(), np.linalg.norm(g, axis=1), accumulated[:, None].copy()))
        step = np.divide(radii, np.sqrt(accumulated), out=np.zeros(rows), where=accumulated > 0)
        u = project_ball(u - step[:, None] * g, radii, "l2")
    return total / n


def ada_grad_batch(
    spec: ProblemSpec,
    radius: Union[float, np.ndarray],
    values: np.ndarray,
    trace: Optional[StepTrace] = None,
) -> np.ndarray:
    """Diagonal AdaGrad clipped to the l∞ ball of each row's radius"""
    radii, streams = _prepare(spec, radius, values, "linf")
    rows, n = streams.shape[:2]
    u = np.zeros((rows, spec.dimension))
    total = np.zeros_like(u)
    accumulated = np.zeros_like(u)
    bound = radii[:, None]
    for t in range(n):
        total += u
        g = spec.subgradient_rows(u, streams[:, t])
        accumulated += g * g
        if trace is not None:
            trace.append((u.copy(), np.linalg.norm(g, axis=1), accumulated.copy()))
        step = np.divide(bound, np.sqrt(accumulated), out=np.zeros_like(u), where=accumulated > 0)
        u = np.clip(u - step * g, -bound, bound)
    return total / n


def ada_emd_batch(
    spec: ProblemSpec,
    radius: Union[float, np.ndarray],
    values: np.ndarray,
    signed: bool = True,
    step_rule: EmdStepRule = "radius",
    trace: Optional[StepTrace] = None,
) -> np.ndarray:
    """Entropic mirror descent on {u ≥ 0, ‖u‖₁ ≤ R}.

    A slack coordinate turns the constraint into the R-scaled simplex. With
    ``signed`` the point is x = u₊ − u₋ over 2d + 1 weights and the uniform start
    maps to x = 0; otherwise x = u over d + 1 weights. The default ``radius`` step is
    η_t = R√2 / (2√Σ‖g‖∞²); ``log_dim`` swaps R√2/2 for √(2 ln W) over the W weights.
    """
    radii, streams = _prepare(spec, radius, values, "l1")
    rows, n = streams.shape[:2]
    d = spec.dimension
    width = 2 * d + 1 if signed else d + 1
    log_w = np.full((rows, width), -math.log(width))
    total = np.zeros((rows, d))
    accumulated = np.zeros(rows)
    for t in range(n):
        w = np.exp(log_w)
        x = radii[:, None] * (w[:, :d] - w[:, d:2 * d] if signed else w[:, :d])
        total += x
        g = spec.subgradient_rows(x, streams[:, t])
        accumulated += np.max(np.abs(g), axis=1) ** 2
        if trace is not None:
            trace.append((x, np.linalg.norm(g, axis=1), accumulated[:, None].copy()))
        root = np.sqrt(accumulated)
        if step_rule == "log_dim":
            eta = np.divide(math.sqrt(2.0 * math.log(width)), root, out=np.zeros(rows), where=root > 0)
        else:
            eta = np.divide(radii * math.sqrt(2.0) / 2.0, root, out=np.zeros(rows), where=root > 0)
        direction = np.zeros_like(log_w)
        direction[:, :d] = g
        if signed:
            direction[:, d:2 * d] = -g
        log_w = log_w - eta[:, None] * direction
        log_w -= logsumexp(log_w, axis=1, keepdims=True)
    return total / n


def sgd_strongly_convex_batch(
    spec: ProblemSpec,
    mu: Union[float, np.ndarray],
    radius: float,
    values: np.ndarray,
) -> np.ndarray:
    """Projected SGD with step 2/(μ(t + 1)) and t-weighted averaging, one μ per row"""
    mus = np.atleast_1d(np.asarray(mu, dtype=float))
    if np.any(mus <= 0):
        raise InvalidParameterError(f"mu must be positive, got {mu}")
    radii, streams = _prepare(spec, np.full(mus.size, radius), values, "l2")
    rows, n = streams.shape[:2]
    mus = np.broadcast_to(mus, (rows,))
    u = np.zeros((rows, spec.dimension))
    total = np.zeros_like(u)
    for t in range(1, n + 1):
        total += t * u
        g = spec.subgradient_rows(u, streams[:, t - 1])
        u = project_ball(u - (2.0 / (mus * (t + 1)))[:, None] * g, radii, "l2")
    return total / (n * (n + 1) / 2.0)


def _single(
    method: str,
    spec: ProblemSpec,
    radius: float,
    samples: SampleBatch,
    p: NormName,
    record_trace: bool,
    seed: Optional[int],
    **kwargs: Any,
) -> OptimizerRun:
    steps: Optional[StepTrace] = [] if record_trace else None
    average = GEOMETRY_BATCHES[p](spec, radius, samples.values[None, ...], trace=steps, **kwargs)[0]
    run = OptimizerRun(
        method=method,
        radius=float(radius),
        norm=p,
        iterate_count=len(samples),
        average_iterate=average,
        seed=seed,
    )
    if steps:
        run.trace = np.stack([s[0][0] for s in steps])
        run.grad_norms = np.array([s[1][0] for s in steps])
        run.accumulators = np.stack([s[2][0] for s in steps])
    logger.debug(f"{method} R={radius:.4g} n={len(samples)} avg_norm={float(norm(average, p)):.4g}")
    return run


def ada_sgd(spec: ProblemSpec, R: float, samples: SampleBatch, record_trace: bool = False,
            seed: Optional[int] = None) -> OptimizerRun:
    """Adaptive SGD in the Euclidean ball of radius R"""
    return _single("ada_sgd", spec, R, samples, "l2", record_trace, seed)


def ada_emd(spec: ProblemSpec, R: float, samples: SampleBatch, record_trace: bool = False,
            seed: Optional[int] = None, signed: bool = True, step_rule: EmdStepRule = "radius") -> OptimizerRun:
    """Adaptive entropic mirror descent in the l1 ball of radius R"""
    return _single("ada_emd", spec, R, samples, "l1", record_trace, seed, signed=signed, step_rule=step_rule)


def ada_grad(spec: ProblemSpec, R: float, samples: SampleBatch, record_trace: bool = False,
             seed: Optional[int] = None) -> OptimizerRun:
    """Diagonal AdaGrad in the l∞ ball of radius R"""
    return _single("ada_grad", spec, R, samples, "linf", record_trace, seed)


def sgd_strongly_convex(spec: ProblemSpec, mu: float, R: float, samples: SampleBatch,
                        seed: Optional[int] = None) -> OptimizerRun:
    """SGD tuned for μ-strong convexity, used as a candidate generator"""
    average = sgd_strongly_convex_batch(spec, mu, R, samples.values[None, ...])[0]
    return OptimizerRun("sgd_strongly_convex", float(R), "l2", len(samples), average, seed=seed)


GEOMETRY_BATCHES = {"l2": ada_sgd_batch, "l1": ada_emd_batch, "linf": ada_grad_batch}
GEOMETRY_METHODS = {"l2": ada_sgd, "l1": ada_emd, "linf": ada_grad}
