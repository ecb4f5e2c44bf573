"""Stochastic convex problems and synthetic families"""

from .base import (
    DomainConstraint,
    PopulationOracle,
    ProblemSpec,
    SampleBatch,
    audit_convexity,
    audit_lipschitz,
    population_suboptimality,
    sample_batch,
)
from .families import (
    AbsLinearAdversarial,
    DenseOptimumLinf,
    EuclideanHingeLike,
    PiecewiseLinearFamily,
    SparseOptimumL1,
    StronglyConvex1D,
    build_family,
    family_names,
)
from .logistic import MulticlassLogistic, logistic_width_helper

__all__ = [
    "AbsLinearAdversarial",
    "DenseOptimumLinf",
    "DomainConstraint",
    "EuclideanHingeLike",
    "MulticlassLogistic",
    "PiecewiseLinearFamily",
    "PopulationOracle",
    "ProblemSpec",
    "SampleBatch",
    "SparseOptimumL1",
    "StronglyConvex1D",
    "audit_convexity",
    "audit_lipschitz",
    "build_family",
    "family_names",
    "logistic_width_helper",
    "population_suboptimality",
    "sample_batch",
]
