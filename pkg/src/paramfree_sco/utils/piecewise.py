"""
Exact arithmetic for one-dimensional convex piecewise-linear objectives

An objective here is h(x) = Σ_i w_i (a_i |x − c_i| + b_i x + e_i) with a_i, w_i ≥ 0.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike

from ..errors import InvalidParameterError, UnboundedObjectiveError


@dataclass(frozen=True)
class PiecewiseLinear1D:
    """Weighted sum of terms a|x − c| + b x + e"""
    abs_slopes: np.ndarray
    kinks: np.ndarray
    lin_slopes: np.ndarray
    offsets: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        shapes = {np.shape(v) for v in (self.abs_slopes, self.kinks, self.lin_slopes, self.offsets, self.weights)}
        if len(shapes) != 1:
            raise InvalidParameterError(f"Term arrays must share one shape, got {shapes}")
        if np.any(np.asarray(self.abs_slopes) < 0) or np.any(np.asarray(self.weights) < 0):
            raise InvalidParameterError("abs slopes and weights must be nonnegative")

    @classmethod
    def from_terms(
        cls,
        a: ArrayLike,
        c: ArrayLike,
        b: ArrayLike,
        e: Optional[ArrayLike] = None,
        weights: Optional[ArrayLike] = None,
    ) -> "PiecewiseLinear1D":
        a = np.atleast_1d(np.asarray(a, dtype=float))
        c = np.broadcast_to(np.asarray(c, dtype=float), a.shape).copy()
        b = np.broadcast_to(np.asarray(b, dtype=float), a.shape).copy()
        e = np.zeros_like(a) if e is None else np.broadcast_to(np.asarray(e, dtype=float), a.shape).copy()
        w = np.full_like(a, 1.0 / a.size) if weights is None else np.broadcast_to(np.asarray(weights, dtype=float), a.shape).copy()
        return cls(a, c, b, e, w)

    def with_abs_term(self, weight: float, kink: float = 0.0) -> "PiecewiseLinear1D":
        """Add ``weight·|x − kink|`` (e.g. an l1 regularizer at the origin)"""
        return PiecewiseLinear1D(
            np.append(self.abs_slopes, weight),
            np.append(self.kinks, kink),
            np.append(self.lin_slopes, 0.0),
            np.append(self.offsets, 0.0),
            np.append(self.weights, 1.0),
        )

    def compact(self) -> "PiecewiseLinear1D":
        """Merge terms that share a kink"""
        kinks, inverse = np.unique(self.kinks, return_inverse=True)
        wa = np.bincount(inverse, weights=self.weights * self.abs_slopes, minlength=kinks.size)
        wb = np.bincount(inverse, weights=self.weights * self.lin_slopes, minlength=kinks.size)
        we = np.bincount(inverse, weights=self.weights * self.offsets, minlength=kinks.size)
        ones = np.ones_like(kinks)
        return PiecewiseLinear1D(wa, kinks, wb, we, ones)

    def value(self, x: np.ndarray) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        order = np.argsort(self.kinks, kind="stable")
        cs = self.kinks[order]
        wa = (self.weights * self.abs_slopes)[order]
        cum_wa = np.concatenate(([0.0], np.cumsum(wa)))
        cum_wac = np.concatenate(([0.0], np.cumsum(wa * cs)))
        idx = np.searchsorted(cs, xs, side="right")
        left = xs * cum_wa[idx] - cum_wac[idx]
        right = (cum_wac[-1] - cum_wac[idx]) - xs * (cum_wa[-1] - cum_wa[idx])
        linear = float(np.sum(self.weights * self.lin_slopes))
        const = float(np.sum(self.weights * self.offsets))
        return left + right + linear * xs + const

    def slopes_at_infinity(self) -> Tuple[float, float]:
        """(slope as x → −∞, slope as x → +∞)"""
        wa = float(np.sum(self.weights * self.abs_slopes))
        wb = float(np.sum(self.weights * self.lin_slopes))
        return wb - wa, wb + wa

    def breakpoints(self) -> np.ndarray:
        active = (self.weights * self.abs_slopes) > 0
        return np.unique(self.kinks[active])

    def minimize(self, tol: float = 1e-12) -> Tuple[float, float]:
        """Exact minimizer by breakpoint scan; ties go to the smallest |x|.

        Raises UnboundedObjectiveError when the objective decreases without bound.
        """
        low, high = self.slopes_at_infinity()
        if low > tol or high < -tol:
            raise UnboundedObjectiveError(
                f"Objective unbounded below (slopes {low:.3g} at -inf, {high:.3g} at +inf)"
            )
        candidates = np.union1d(self.breakpoints(), [0.0])
        values = self.value(candidates)
        best = float(values.min())
        scale = max(1.0, abs(best))
        near = np.nonzero(values <= best + tol * scale)[0]
        # Smallest |x| first, then the smaller x
        pick = near[np.lexsort((candidates[near], np.abs(candidates[near])))[0]]
        return float(candidates[pick]), float(values[pick])

    def descend_from(self, x0: float, tol: float = 1e-12) -> Tuple[float, float]:
        """Walk the breakpoints downhill from the one nearest ``x0``.

        Convexity makes the first breakpoint with no lower neighbour a global
        minimizer; ties are broken as in ``minimize``.
        """
        low, high = self.slopes_at_infinity()
        if low > tol or high < -tol:
            raise UnboundedObjectiveError(
                f"Objective unbounded below (slopes {low:.3g} at -inf, {high:.3g} at +inf)"
            )
        candidates = np.union1d(self.breakpoints(), [0.0])
        cache: Dict[int, float] = {}

        def at(i: int) -> float:
            if i not in cache:
                cache[i] = float(self.value(candidates[i:i + 1])[0])
            return cache[i]

        i = int(np.argmin(np.abs(candidates - x0)))
        while i > 0 and at(i - 1) < at(i):
            i -= 1
        while i + 1 < candidates.size and at(i + 1) < at(i):
            i += 1
        best = at(i)
        near = best + tol * max(1.0, abs(best))
        lo, hi = i, i
        while lo > 0 and at(lo - 1) <= near:
            lo -= 1
        while hi + 1 < candidates.size and at(hi + 1) <= near:
            hi += 1
        if candidates[lo] <= 0.0 <= candidates[hi]:
            pick = int(np.searchsorted(candidates, 0.0))
        else:
            pick = lo if abs(candidates[lo]) <= abs(candidates[hi]) else hi
        return float(candidates[pick]), at(pick)
