"""Concentration widths and their Monte-Carlo coverage checks"""

from .monte_carlo import COVERAGE_CHECKS, CoverageResult, coverage_suite
from .widths import (
    SubGammaTail,
    TailBudget,
    bennett_width,
    dependent_sum_bound,
    empirical_bennett_from_variance,
    empirical_bennett_width,
    hoeffding_width,
    union_bound_sum,
    vec_inf_width,
    vec_l1_width,
    vec_l2_width,
)

__all__ = [
    "COVERAGE_CHECKS",
    "CoverageResult",
    "SubGammaTail",
    "TailBudget",
    "bennett_width",
    "coverage_suite",
    "dependent_sum_bound",
    "empirical_bennett_from_variance",
    "empirical_bennett_width",
    "hoeffding_width",
    "union_bound_sum",
    "vec_inf_width",
    "vec_l1_width",
    "vec_l2_width",
]
