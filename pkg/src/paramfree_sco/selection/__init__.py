"""Model selection: loss matrices, width rules and selectors"""

from .loss_matrix import CandidateModel, LossMatrix
from .selectors import SelectionOutcome, reliable_select, reliable_select_means, standard_select
from .widths import (
    CUSTOM_RULE,
    MULTI_GEOMETRY_RULE,
    PRACTICAL_RULE,
    THEORY_RULE,
    ConfidenceWidths,
    widths_from_column,
    widths_multi_geometry,
    widths_practical,
    widths_theory,
)

__all__ = [
    "CUSTOM_RULE",
    "MULTI_GEOMETRY_RULE",
    "PRACTICAL_RULE",
    "THEORY_RULE",
    "CandidateModel",
    "ConfidenceWidths",
    "LossMatrix",
    "SelectionOutcome",
    "reliable_select",
    "reliable_select_means",
    "standard_select",
    "widths_from_column",
    "widths_multi_geometry",
    "widths_practical",
    "widths_theory",
]
