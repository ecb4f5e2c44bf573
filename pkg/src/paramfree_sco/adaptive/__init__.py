"""Distance-adaptive two-stage optimization"""

from .pipeline import (
    GEOMETRIES,
    AdaptiveResult,
    SelectedResult,
    assert_disjoint,
    lambda_grid_adaptive,
    multi_geometry,
    optimal_adaptive,
)
from .regularization import (
    GEOMETRY_ALGORITHMS,
    GeometryRow,
    compute_lambda,
    evaluation_points,
    geometry_row,
    gradient_variances,
    lambda_grid,
    variance_term,
)

__all__ = [
    "GEOMETRIES",
    "GEOMETRY_ALGORITHMS",
    "AdaptiveResult",
    "GeometryRow",
    "SelectedResult",
    "assert_disjoint",
    "compute_lambda",
    "evaluation_points",
    "geometry_row",
    "gradient_variances",
    "lambda_grid",
    "lambda_grid_adaptive",
    "multi_geometry",
    "optimal_adaptive",
    "variance_term",
]
