"""
Validation loss matrices: per-sample losses of a reference model and K candidates
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from ..errors import ConfigError, InvalidParameterError
from ..problems.base import ProblemSpec, SampleBatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidateModel:
    """A parameter vector and where it came from"""
    index: int
    point: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class LossMatrix:
    """n × (K + 1) losses; column k holds f_i(x_k) and column 0 is the reference x₀"""
    values: np.ndarray
    sample_ids: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.size == 0:
            raise InvalidParameterError(f"Loss matrix must be a nonempty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("Loss matrix has missing or non-finite entries")
        object.__setattr__(self, "values", values)
        if self.sample_ids is not None and len(self.sample_ids) != values.shape[0]:
            raise InvalidParameterError("sample_ids length does not match the number of rows")

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def K(self) -> int:
        return int(self.values.shape[1] - 1)

    def means(self) -> np.ndarray:
        """Validation errors F̄_0..F̄_K"""
        return self.values.mean(axis=0)

    def differences(self) -> np.ndarray:
        """Z_ik = f_i(x_k) − f_i(x₀); column 0 is identically zero"""
        return self.values - self.values[:, [0]]

    def difference_variances(self) -> np.ndarray:
        """Unbiased sample variance of each difference column"""
        if self.n < 2:
            raise InvalidParameterError("variance-based widths need at least two validation samples")
        return np.var(self.differences(), axis=0, ddof=1)

    @classmethod
    def from_problem(
        cls, spec: ProblemSpec, points: Union[np.ndarray, Sequence[CandidateModel]], batch: SampleBatch
    ) -> "LossMatrix":
        """Evaluate candidate points (reference first) on a validation batch"""
        if len(points) and isinstance(points[0], CandidateModel):
            stacked = np.stack([c.point for c in points])  # type: ignore[union-attr]
        else:
            stacked = np.asarray(points, dtype=float)
        return cls(spec.loss_columns(stacked, batch), batch.ids.copy())

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "LossMatrix":
        """Read ``sample_id,model_0,…,model_K`` rows"""
        path = Path(path)
        try:
            with path.open(newline="") as handle:
                reader = csv.reader(row for row in handle if not row.startswith("#"))
                header = next(reader)
                rows = [row for row in reader if row]
        except (OSError, StopIteration) as e:
            raise ConfigError(f"Cannot read loss matrix from {path}: {e}") from e
        expected = ["sample_id"] + [f"model_{k}" for k in range(len(header) - 1)]
        if header != expected or len(header) < 2:
            raise ConfigError(f"Unexpected loss matrix header in {path}: {header}")
        if any(len(row) != len(header) for row in rows):
            raise ConfigError(f"Loss matrix {path} has rows with missing entries")
        try:
            ids = np.array([int(row[0]) for row in rows], dtype=np.int64)
            values = np.array([[float(v) for v in row[1:]] for row in rows])
        except ValueError as e:
            raise ConfigError(f"Non-numeric entry in {path}: {e}") from e
        logger.info(f"Loaded {len(rows)} validation rows and {len(header) - 1} models from {path}")
        return cls(values, ids)

    def write_csv(self, path: Union[str, Path]) -> None:
        ids = self.sample_ids if self.sample_ids is not None else np.arange(self.n)
        with Path(path).open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["sample_id"] + [f"model_{k}" for k in range(self.K + 1)])
            for sample_id, row in zip(ids, self.values):
                writer.writerow([int(sample_id)] + [repr(float(v)) for v in row])
