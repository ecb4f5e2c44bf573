"""
Experiment configuration: key=value files merged with command-line overrides
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .. import config
from ..errors import ConfigError
from ..problems.families import family_names
from ..selection.widths import PRACTICAL_RULE, THEORY_RULE

logger = logging.getLogger(__name__)

Experiment = Literal["lowerbound", "scaling", "concentration", "select", "adaptive", "strongconvex"]

FAMILY_PREFIX = "family."
WIDTH_RULE_ALIASES = {"theory": THEORY_RULE, "practical": PRACTICAL_RULE}


class ExperimentConfig(BaseModel):
    """Resolved experiment configuration"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: Experiment
    family: Optional[str] = None
    family_params: Dict[str, str] = {}
    n: int = 3000
    n_grid: List[int] = []
    trials: int = 100
    seed: int = config.DEFAULT_SEED
    delta: float = 0.1
    gamma: float = 3.0
    workers: int = config.DEFAULT_WORKERS
    chunk: int = 250
    out: Optional[str] = None

    # Experiment-specific knobs
    rate_exponents: List[float] = [0, 1, 2, 3, 4, 5, 6]
    method: Literal["known_radius", "adaptive", "lambda_grid", "multi_geometry"] = "known_radius"
    mode: Literal["single", "grid", "all"] = "single"
    geometry: str = "l2"
    lambda_strategy: Literal["lipschitz_envelope", "grid_sup", "exact_1d"] = "lipschitz_envelope"
    lipschitz_inflation: float = 1.0
    erm_max_iter: Optional[int] = None
    strict_erm: bool = False
    radius: Optional[float] = None
    mu_grid: List[float] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
    width_rule: Literal["theory_eq4", "practical_sec5"] = "theory_eq4"
    trial_scale: float = 1.0
    loss_csv: Optional[str] = None
    m_values: List[float] = []
    tau: List[float] = []

    @field_validator("n_grid", "rate_exponents", "mu_grid", "m_values", "tau", mode="before")
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [v.strip() for v in value.split(",") if v.strip()]
        return value

    @field_validator("width_rule", mode="before")
    @classmethod
    def _width_rule_alias(cls, value: Any) -> Any:
        return WIDTH_RULE_ALIASES.get(value, value) if isinstance(value, str) else value

    @field_validator("trials", "workers", "chunk")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("n_grid")
    @classmethod
    def _increasing(cls, value: List[int]) -> List[int]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return value

    @field_validator("delta")
    @classmethod
    def _probability(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        return value

    @field_validator("gamma")
    @classmethod
    def _gamma(cls, value: float) -> float:
        if value < 1.0:
            raise ValueError("gamma must be at least 1")
        return value

    @field_validator("geometry")
    @classmethod
    def _geometry(cls, value: str) -> str:
        from ..utils.norms import parse_norm

        return value if value == "all" else parse_norm(value)

    @model_validator(mode="after")
    def _family_known(self) -> "ExperimentConfig":
        if self.family is not None and self.family not in family_names():
            raise ValueError(f"unknown family '{self.family}'")
        if self.n < 1:
            raise ValueError("n must be positive")
        return self

    def grid(self) -> List[int]:
        return list(self.n_grid) or [self.n]

    def resolved_items(self) -> List[str]:
        """Sorted key=value lines echoing every setting"""
        items = []
        for key, value in sorted(self.model_dump().items()):
            if key == "family_params":
                items.extend(f"{FAMILY_PREFIX}{k}={v}" for k, v in sorted(value.items()))
                continue
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            items.append(f"{key}={'' if value is None else value}")
        return items


def parse_key_values(lines: List[str], source: str = "config") -> Dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment"""
    pairs: Dict[str, str] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{number}: empty key")
        pairs[key] = value
    return pairs


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    settings: Dict[str, Any] = {}
    family_params: Dict[str, str] = {}
    for key, value in values.items():
        if key.startswith(FAMILY_PREFIX):
            family_params[key[len(FAMILY_PREFIX):]] = str(value)
        else:
            settings[key] = value
    settings["family_params"] = family_params
    try:
        return ExperimentConfig(**settings)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment configuration: {e}") from e


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """Defaults < config file < overrides"""
    merged: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from e
        merged.update(parse_key_values(text.splitlines(), str(path)))
        logger.info(f"Loaded configuration from {path}")
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    return build_config(merged)
