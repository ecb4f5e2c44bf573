"""
Norms, dual norms and ball projections for the l2, l1 and l-infinity geometries
"""

from typing import Literal, Union

import numpy as np

from ..errors import InvalidParameterError

NormName = Literal["l2", "l1", "linf"]

_ALIASES = {
    "2": "l2", "2.0": "l2", "l2": "l2",
    "1": "l1", "1.0": "l1", "l1": "l1",
    "inf": "linf", "linf": "linf", "infinity": "linf",
}
_DUALS = {"l2": "l2", "l1": "linf", "linf": "l1"}
_ORDERS = {"l2": 2, "l1": 1, "linf": np.inf}


def parse_norm(value: Union[str, int, float]) -> NormName:
    """Map user spellings (2, 1, 'inf', 'l2', ...) to a canonical norm name"""
    key = str(value).strip().lower()
    if key not in _ALIASES:
        raise InvalidParameterError(f"Unknown norm: {value}")
    return _ALIASES[key]  # type: ignore[return-value]


def dual_norm_name(p: NormName) -> NormName:
    return _DUALS[p]  # type: ignore[return-value]


def norm(x: np.ndarray, p: NormName, axis: int = -1) -> np.ndarray:
    """Vector norm along ``axis``; returns a scalar array for 1-D input"""
    return np.linalg.norm(np.asarray(x, dtype=float), ord=_ORDERS[p], axis=axis)


def matrix_l2_inf(x: np.ndarray) -> float:
    """Max over rows of the row-wise Euclidean norm"""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return float(np.max(np.linalg.norm(x, axis=1))) if x.size else 0.0


def _project_l2(x: np.ndarray, radius: np.ndarray) -> np.ndarray:
    lengths = np.linalg.norm(x, axis=-1, keepdims=True)
    scale = np.ones_like(lengths)
    outside = lengths > radius
    np.divide(radius, lengths, out=scale, where=outside)
    return x * scale


def _project_l1(x: np.ndarray, radius: np.ndarray) -> np.ndarray:
    # Sort-based simplex projection applied to |x|, row-wise
    out = np.array(x, dtype=float, copy=True)
    flat = out.reshape(-1, out.shape[-1])
    radii = np.broadcast_to(radius, out.shape[:-1] + (1,)).reshape(-1)
    for row, r in zip(flat, radii):
        magnitude = np.abs(row)
        if magnitude.sum() <= r:
            continue
        if r <= 0:
            row[:] = 0.0
            continue
        mu = np.sort(magnitude)[::-1]
        cumulative = np.cumsum(mu) - r
        ranks = np.arange(1, mu.size + 1)
        rho = np.nonzero(mu - cumulative / ranks > 0)[0][-1]
        theta = cumulative[rho] / (rho + 1.0)
        row[:] = np.sign(row) * np.maximum(magnitude - theta, 0.0)
    return out


def project_ball(x: np.ndarray, radius: Union[float, np.ndarray], p: NormName) -> np.ndarray:
    """Exact Euclidean projection onto {‖x‖_p ≤ radius}, row-wise for 2-D input.

    ``radius`` may be a scalar or one radius per row.
    """
    x = np.asarray(x, dtype=float)
    r = np.asarray(radius, dtype=float)
    if np.any(r < 0):
        raise InvalidParameterError("radius must be nonnegative")
    if r.ndim and x.ndim > 1:
        r = r.reshape(-1, 1)
    if p == "l2":
        return _project_l2(x, r)
    if p == "linf":
        return np.clip(x, -r, r)
    return _project_l1(x, r)
