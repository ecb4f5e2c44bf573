"""
Multiclass logistic regression on bounded features
"""

from typing import Any, Dict

import numpy as np
from scipy.special import logsumexp, softmax

from ..errors import InvalidParameterError
from ..utils.norms import matrix_l2_inf
from .base import ProblemSpec


def logistic_width_helper(x: np.ndarray, x0: np.ndarray) -> float:
    """M(x) = 2·max_c ‖x_c − x0_c‖₂.

    Bounds |f(x; S) − f(x0; S)| for cross-entropy losses when ‖features‖₂ ≤ 1,
    since each sample loss is 2-Lipschitz in the (2, ∞) matrix norm.
    """
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if x.ndim != 2 or x.shape != x0.shape:
        raise InvalidParameterError(f"Expected two C×m matrices of one shape, got {x.shape} and {x0.shape}")
    return 2.0 * matrix_l2_inf(x - x0)


class MulticlassLogistic(ProblemSpec):
    """Cross-entropy loss of a C×m weight matrix (flattened row-major) on (a, y) samples.

    Features lie in the unit Euclidean ball; labels follow a softmax model with
    a planted weight matrix of the given scale.
    """

    name = "multiclass_logistic"
    PARAM_TYPES = {"classes": int, "features": int, "scale": float}

    def __init__(self, classes: int = 3, features: int = 5, scale: float = 2.0):
        if classes < 2 or features < 1:
            raise InvalidParameterError("need at least two classes and one feature")
        d = classes * features
        super().__init__(d, lipschitz_l2=float(np.sqrt(2.0)), lipschitz_coord=np.ones(d))
        self.classes, self.features, self.scale = int(classes), int(features), float(scale)
        planted = np.zeros((classes, features))
        planted[np.arange(classes), np.arange(classes) % features] = self.scale
        self.planted = planted

    def params(self) -> Dict[str, Any]:
        return {"classes": self.classes, "features": self.features, "scale": self.scale}

    def as_matrix(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float).reshape(self.classes, self.features)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        direction = rng.standard_normal((n, self.features))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        features = direction * rng.random((n, 1)) ** (1.0 / self.features)
        probs = softmax(features @ self.planted.T, axis=1)
        cumulative = np.cumsum(probs, axis=1)
        labels = (rng.random((n, 1)) > cumulative).sum(axis=1)
        labels = np.minimum(labels, self.classes - 1)
        return np.column_stack([features, labels.astype(float)])

    def _split(self, points: np.ndarray, values: np.ndarray) -> tuple:
        weights = points.reshape(-1, self.classes, self.features)
        features = values[:, : self.features]
        labels = values[:, self.features].astype(int)
        logits = np.einsum("bcm,bm->bc", weights, features)
        return features, labels, logits

    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        _, labels, logits = self._split(points, values)
        return logsumexp(logits, axis=1) - logits[np.arange(len(labels)), labels]

    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        features, labels, logits = self._split(points, values)
        residual = softmax(logits, axis=1)
        residual[np.arange(len(labels)), labels] -= 1.0
        return np.einsum("bc,bm->bcm", residual, features).reshape(len(labels), -1)
