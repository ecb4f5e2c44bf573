"""Shared fixtures for the test suite"""

from typing import Optional

import numpy as np
import pytest

from paramfree_sco.problems.base import DomainConstraint, ProblemSpec, SampleBatch


class LinearProblem(ProblemSpec):
    """f(x; S) = ⟨c, x⟩ for every sample; gradients are deterministic"""

    name = "linear"

    def __init__(self, direction, domain: Optional[DomainConstraint] = None):
        direction = np.atleast_1d(np.asarray(direction, dtype=float))
        super().__init__(
            direction.size,
            domain,
            lipschitz_l2=float(np.linalg.norm(direction)),
            lipschitz_coord=np.abs(direction),
        )
        self.direction = direction

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.zeros(n)

    def loss_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        return points @ self.direction

    def subgradient_rows(self, points: np.ndarray, values: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.direction, points.shape).copy()


def batch_of(values) -> SampleBatch:
    values = np.asarray(values)
    return SampleBatch(np.arange(len(values), dtype=np.int64), values)


@pytest.fixture
def decreasing_line():
    """f(u) = −u in one dimension"""
    return LinearProblem([-1.0])


@pytest.fixture
def increasing_line():
    """f(u) = u in one dimension"""
    return LinearProblem([1.0])


@pytest.fixture
def flat_problem():
    """Zero loss and zero gradients in three dimensions"""
    return LinearProblem([0.0, 0.0, 0.0])


@pytest.fixture
def make_linear():
    return LinearProblem


@pytest.fixture
def make_batch():
    return batch_of
