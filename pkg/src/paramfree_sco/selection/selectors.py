"""
Greedy and reliable model selection over a finite candidate set
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike

from ..errors import InvalidParameterError
from .loss_matrix import LossMatrix
from .widths import CUSTOM_RULE, ConfidenceWidths

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionOutcome:
    """Chosen index plus the quantities the choice was made from"""
    chosen: int
    method: str
    means: np.ndarray
    tau: Optional[np.ndarray] = None
    theta: Optional[float] = None
    safe_set: Optional[Tuple[int, ...]] = None
    gamma: Optional[float] = None
    width_rule: Optional[str] = None

    def to_rows(self) -> List[Dict[str, Any]]:
        """One row per candidate: k, F̄_k, τ_k, in_safe_set, chosen"""
        rows = []
        for k, mean in enumerate(self.means):
            rows.append({
                "method": self.method,
                "k": k,
                "mean_loss": float(mean),
                "tau": float(self.tau[k]) if self.tau is not None else "",
                "in_safe_set": int(k in self.safe_set) if self.safe_set is not None else "",
                "chosen": int(k == self.chosen),
                "width_rule": self.width_rule or "",
            })
        return rows


def standard_select(losses: LossMatrix, include_reference: bool = True) -> SelectionOutcome:
    """Smallest validation error, lowest index on ties.

    With ``include_reference=False`` the reference column is not a candidate
    (selection among trained models only); indices still refer to the matrix.
    """
    means = losses.means()
    first = 0 if include_reference else 1
    if means.size <= first:
        raise InvalidParameterError("no candidates to select from")
    chosen = first + int(np.argmin(means[first:]))
    return SelectionOutcome(chosen=chosen, method="greedy", means=means)


def reliable_select_means(
    means: ArrayLike, tau: ArrayLike, gamma: float = 3.0, width_rule: str = CUSTOM_RULE
) -> SelectionOutcome:
    """Reliable selection from validation means and widths.

    θ = min_k (F̄_k + γτ_k); safe set 𝓕 = {k : F̄_k + τ_k ≤ θ}; choose argmin of F̄ over 𝓕.
    𝓕 always holds the index attaining θ because γ ≥ 1 and τ ≥ 0.
    """
    if not gamma >= 1:
        raise InvalidParameterError(f"gamma must be at least 1, got {gamma}")
    means = np.asarray(means, dtype=float).reshape(-1)
    widths = ConfidenceWidths(np.asarray(tau, dtype=float), width_rule).tau
    if widths.size != means.size:
        raise InvalidParameterError(f"{means.size} means but {widths.size} widths")
    theta = float(np.min(means + gamma * widths))
    safe = np.nonzero(means + widths <= theta)[0]
    chosen = int(safe[np.argmin(means[safe])])
    logger.debug(f"reliable selection: theta={theta:.6g}, safe set={safe.tolist()}, chosen={chosen}")
    return SelectionOutcome(
        chosen=chosen,
        method="reliable",
        means=means,
        tau=widths,
        theta=theta,
        safe_set=tuple(int(k) for k in safe),
        gamma=float(gamma),
        width_rule=width_rule,
    )


def reliable_select(losses: LossMatrix, widths: ConfidenceWidths, gamma: float = 3.0) -> SelectionOutcome:
    """Reliable model selection on a loss matrix"""
    if widths.tau.size != losses.K + 1:
        raise InvalidParameterError(f"need {losses.K + 1} widths, got {widths.tau.size}")
    return reliable_select_means(losses.means(), widths.tau, gamma, widths.rule)
