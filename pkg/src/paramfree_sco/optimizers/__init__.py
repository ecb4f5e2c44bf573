"""Adaptive optimizers and the regularized ERM solver"""

from .adaptive_methods import (
    GEOMETRY_BATCHES,
    GEOMETRY_METHODS,
    OptimizerRun,
    ada_emd,
    ada_emd_batch,
    ada_grad,
    ada_grad_batch,
    ada_sgd,
    ada_sgd_batch,
    sgd_strongly_convex,
    sgd_strongly_convex_batch,
)
from .erm import ErmSolution, regularized_erm, regularized_objective, regularizer_subgradient

__all__ = [
    "ErmSolution",
    "GEOMETRY_BATCHES",
    "GEOMETRY_METHODS",
    "OptimizerRun",
    "ada_emd",
    "ada_emd_batch",
    "ada_grad",
    "ada_grad_batch",
    "ada_sgd",
    "ada_sgd_batch",
    "regularized_erm",
    "regularized_objective",
    "regularizer_subgradient",
    "sgd_strongly_convex",
    "sgd_strongly_convex_batch",
]
