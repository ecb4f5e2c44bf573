"""
CSV reports for experiment runs
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .. import __version__
from ..config import get_runtime_status
from ..errors import InvalidParameterError

logger = logging.getLogger(__name__)

# Settings that change scheduling but never results
UNREPORTED_KEYS = ("workers",)


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope of log y against log x and its standard error"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise InvalidParameterError("slope fit needs two or more paired points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidParameterError("slope fit needs positive values")
    if x.size == 2:
        slope = float(np.diff(np.log(y))[0] / np.diff(np.log(x))[0])
        return slope, 0.0
    fit = stats.linregress(np.log(x), np.log(y))
    return float(fit.slope), float(fit.stderr)


def _cell(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if math.isfinite(value) else str(value)
    return value


@dataclass
class ExperimentReport:
    """Config echo, per-trial rows and summary metrics of one run"""
    experiment: str
    config_items: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def header_lines(self) -> List[str]:
        lines = [f"# experiment={self.experiment}", f"# version={__version__}"]
        runtime = get_runtime_status()
        for key in ("environment", "erm_max_iter", "erm_tol_scale"):
            lines.append(f"# runtime.{key}={runtime[key]}")
        for item in self.config_items:
            if item.split("=", 1)[0] not in UNREPORTED_KEYS:
                lines.append(f"# {item}")
        return lines

    def columns(self) -> List[str]:
        names: List[str] = []
        for row in self.rows:
            names.extend(k for k in row if k not in names)
        return names

    def rows_csv(self) -> str:
        buffer = io.StringIO()
        buffer.write("\n".join(self.header_lines()) + "\n")
        columns = self.columns()
        if columns:
            writer = csv.DictWriter(buffer, fieldnames=columns, restval="", lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _cell(v) for k, v in row.items()})
        return buffer.getvalue()

    def summary_csv(self) -> str:
        buffer = io.StringIO()
        buffer.write("\n".join(self.header_lines()) + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["metric", "value"])
        for key, value in self.summary.items():
            writer.writerow([key, _cell(value)])
        return buffer.getvalue()

    def write(self, out: Union[str, Path]) -> Tuple[Path, Path]:
        """Write ``out`` (per-trial rows) and ``<stem>.summary.csv``"""
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        summary_path = summary_path_for(out)
        out.write_text(self.rows_csv())
        summary_path.write_text(self.summary_csv())
        logger.info(f"Wrote {len(self.rows)} rows to {out} and summary to {summary_path}")
        return out, summary_path


def summary_path_for(out: Union[str, Path]) -> Path:
    out = Path(out)
    return out.with_name(f"{out.stem}.summary.csv")


def quantile(values: Iterable[float], q: float) -> float:
    values = np.asarray(list(values), dtype=float)
    return float(np.quantile(values, q)) if values.size else math.nan


def read_report(path: Union[str, Path]) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    """Parse a report back into (header items, rows)"""
    header: Dict[str, str] = {}
    body: List[str] = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            header[key] = value
        elif line:
            body.append(line)
    rows = list(csv.DictReader(body)) if body else []
    return header, rows

