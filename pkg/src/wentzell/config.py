"""Problem configuration: layered YAML validated by pydantic, with environment overrides.

A problem file is deep-merged over ``config/default.yaml``.  Unknown keys are
rejected; parse and validation errors carry the line and column of the
offending node in the problem file.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Annotated, Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from wentzell.constants import (
    APRIORI_MAX_RATIO,
    COERCIVITY_SAMPLES,
    ENERGY_TOL,
    HVI_FACTOR,
    HVI_TEST_FUNCTIONS,
    HYPOTHESIS_SAMPLES,
    INCLUSION_FACTOR,
    INCLUSION_MIN_FRACTION,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
)
from wentzell.errors import ConfigError

DEFAULT_CONFIG_DIR = Path(__file__).parent.parent.parent / "config"


def _deep_merge(base: dict[str, Any], overlay: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge overlay into base. Overlay values win."""
    result = base.copy()
    for key, value in overlay.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def _load_yaml(path: Path) -> dict[str, Any]:
    """Load a YAML mapping, returning an empty dict if the file doesn't exist."""
    if not path.exists():
        return {}
    text = path.read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ConfigError(
            f"YAML syntax error: {exc.problem}",
            path=str(path),
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", path=str(path), line=1, column=1)
    return data


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


class IntervalDomainConfig(_Section):
    kind: Literal["interval"] = "interval"
    x0: float = 0.0
    x1: float = 1.0
    n: int = Field(4, ge=1)


class PolygonDomainConfig(_Section):
    kind: Literal["polygon"]
    vertices: list[tuple[float, float]]
    h: float = Field(gt=0)

    @field_validator("vertices")
    @classmethod
    def at_least_three(cls, v: list[tuple[float, float]]) -> list[tuple[float, float]]:
        if len(v) < 3:
            raise ValueError("a polygon needs at least three vertices")
        return v


DomainConfig = Annotated[IntervalDomainConfig | PolygonDomainConfig, Field(discriminator="kind")]


class BoundaryConfig(_Section):
    a: str = "1"
    a0: float = 1.0

    @field_validator("a", mode="before")
    @classmethod
    def coerce_expression(cls, v: Any) -> str:
        return str(v)

    @field_validator("a0")
    @classmethod
    def positive_lower_bound(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"boundary coefficient needs a >= a0 > 0, got a0 = {v}")
        return v


class TimeConfig(_Section):
    T: float = Field(1.0, gt=0)
    dt: float = Field(0.05, gt=0)


class RegularizationConfig(_Section):
    eps: float = Field(0.1, gt=0)
    schedule: Literal["geometric", "constant"] = "geometric"


class GrowthConfig(_Section):
    c: float = Field(gt=0)
    theta: float = Field(ge=0, le=1)
    d: float | None = Field(None, ge=0)


class PieceConfig(_Section):
    upper: float
    expr: str

    @field_validator("expr", mode="before")
    @classmethod
    def coerce_expression(cls, v: Any) -> str:
        return str(v)


class GraphConfig(_Section):
    pieces: list[PieceConfig] = []
    tail: str = "0"
    convention: Literal["left", "right"] = "right"
    growth: GrowthConfig | None = None

    @model_validator(mode="before")
    @classmethod
    def plain_expression(cls, data: Any) -> Any:
        if isinstance(data, (str, int, float)):
            return {"tail": str(data)}
        return data

    @field_validator("tail", mode="before")
    @classmethod
    def coerce_expression(cls, v: Any) -> str:
        return str(v)

    def graph_spec(self) -> dict[str, Any]:
        return {
            "pieces": [{"upper": p.upper, "expr": p.expr} for p in self.pieces],
            "tail": self.tail,
            "convention": self.convention,
        }


class ReactionConfig(_Section):
    gamma1: GraphConfig = GraphConfig()
    gamma2: GraphConfig = GraphConfig()


class SourcesConfig(_Section):
    f1: str = "0"
    f2: str = "0"
    u0: str = "0"
    exact: str | None = None
    manufactured: bool = False
    initial_projection: Literal["interpolation", "l2"] = "interpolation"

    @field_validator("f1", "f2", "u0", mode="before")
    @classmethod
    def coerce_expression(cls, v: Any) -> str:
        return str(v)

    @model_validator(mode="after")
    def manufactured_needs_exact(self) -> SourcesConfig:
        if self.manufactured and self.exact is None:
            raise ValueError("manufactured sources need an exact solution")
        return self


class NewtonConfig(_Section):
    tol: float = Field(NEWTON_TOL, gt=0)
    max_iter: int = Field(NEWTON_MAX_ITER, ge=1)


class ChecksConfig(_Section):
    energy_tol: float = Field(ENERGY_TOL, gt=0)
    hvi_test_functions: int = Field(HVI_TEST_FUNCTIONS, ge=1)
    hvi_factor: float = Field(HVI_FACTOR, gt=0)
    inclusion_factor: float = Field(INCLUSION_FACTOR, ge=0)
    inclusion_min_fraction: float = Field(INCLUSION_MIN_FRACTION, ge=0, le=1)
    apriori_max_ratio: float = Field(APRIORI_MAX_RATIO, ge=1)
    hypothesis_range: tuple[float, float] = (-10.0, 10.0)
    hypothesis_samples: int = Field(HYPOTHESIS_SAMPLES, ge=2)
    coercivity_samples: int = Field(COERCIVITY_SAMPLES, ge=1)

    @field_validator("hypothesis_range")
    @classmethod
    def bounded_range(cls, v: tuple[float, float]) -> tuple[float, float]:
        lo, hi = v
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"hypothesis range must be a bounded nonempty interval, got {v}")
        return v


class StudyConfig(_Section):
    levels: int = Field(3, ge=2)
    workers: int = Field(1, ge=1)


class OutputConfig(_Section):
    out_dir: str = "./out"
    export_operators: bool = False


class LoggingConfig(_Section):
    level: str = "INFO"
    format: Literal["json", "text"] = "text"
    dir: str | None = None


# ---------------------------------------------------------------------------
# Problem
# ---------------------------------------------------------------------------


class ProblemConfig(_Section):
    name: str = "problem"
    domain: DomainConfig = IntervalDomainConfig()
    mesh_level: int = Field(0, ge=0)
    boundary: BoundaryConfig = BoundaryConfig()
    time: TimeConfig = TimeConfig()
    regularization: RegularizationConfig = RegularizationConfig()
    reaction: ReactionConfig = ReactionConfig()
    sources: SourcesConfig = SourcesConfig()
    newton: NewtonConfig = NewtonConfig()
    checks: ChecksConfig = ChecksConfig()
    study: StudyConfig = StudyConfig()
    output: OutputConfig = OutputConfig()
    seed: int = 0
    logging: LoggingConfig = LoggingConfig()

    @classmethod
    def load(cls, path: Path | None = None, config_dir: Path | None = None) -> ProblemConfig:
        """Load a problem file over config/default.yaml.

        Priority (lowest to highest):
        1. config/default.yaml
        2. the problem file at ``path``
        """
        config_dir = DEFAULT_CONFIG_DIR if config_dir is None else config_dir
        base = _load_yaml(config_dir / "default.yaml")
        overlay: dict[str, Any] = {}
        if path is not None:
            if not path.exists():
                raise ConfigError("config file not found", path=str(path))
            overlay = _load_yaml(path)
        merged = _deep_merge(base, overlay)
        # a domain of another kind replaces the default instead of merging into it
        base_domain = base.get("domain")
        new_domain = overlay.get("domain")
        if isinstance(base_domain, dict) and isinstance(new_domain, dict):
            if new_domain.get("kind", "interval") != base_domain.get("kind", "interval"):
                merged["domain"] = new_domain
        return cls.from_mapping(merged, source=path)

    @classmethod
    def from_mapping(cls, data: dict[str, Any], source: Path | None = None) -> ProblemConfig:
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            first = exc.errors()[0]
            loc = tuple(first["loc"])
            line = column = None
            if source is not None and source.exists():
                line, column = _locate(source.read_text(), loc)
            dotted = ".".join(str(part) for part in loc)
            raise ConfigError(
                f"{dotted}: {first['msg']}",
                path=str(source) if source else "",
                line=line,
                column=column,
            ) from exc


class RuntimeSettings(BaseSettings):
    """Environment overrides (WENTZELL_OUT_DIR, WENTZELL_LOG_LEVEL)."""

    model_config = SettingsConfigDict(env_prefix="WENTZELL_")

    out_dir: str | None = None
    log_level: str | None = None


def _locate(text: str, loc: tuple[Any, ...]) -> tuple[int | None, int | None]:
    """Line and column (1-based) of the YAML node at ``loc``, or its closest parent."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None, None
    found = None
    for part in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == str(part)), None)
            if match is None:
                # pydantic tags union members; skip labels that are not YAML keys
                continue
            found = node = match
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            found = node = node.value[part]
        else:
            break
    if found is None:
        return None, None
    return found.start_mark.line + 1, found.start_mark.column + 1
