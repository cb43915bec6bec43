"""Surface definition files: schema, validation and loading."""
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, field_validator, model_validator

from models.errors import ConfigError, SurfaceCheckError
from models.geometry import AmbientMetric, FrameOptions
from models.models import Backend, CheckName
from services.exprjet import bind_field, bind_scalar, graph_immersion, parametric_immersion

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
PIN_NAMES = ("xi", "v", "u", "n")


class AmbientSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    signs: List[int]

    @field_validator("signs")
    @classmethod
    def valid_signature(cls, signs):
        AmbientMetric(tuple(signs))
        return signs


class ImmersionSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    form: Literal["graph", "parametric"] = "parametric"
    free: Optional[List[str]] = None
    coordinates: Dict[str, str]


class FrameSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pins: Dict[str, List[str]] = Field(default_factory=dict)

    @field_validator("pins")
    @classmethod
    def known_pins(cls, pins):
        for name, components in pins.items():
            if name not in PIN_NAMES:
                raise ValueError(f"unknown pinned vector '{name}', expected one of {PIN_NAMES}")
            if len(components) != 4:
                raise ValueError(f"pinned vector '{name}' needs four components")
        return pins


class GridSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n1: int = Field(5, ge=1)
    n2: int = Field(5, ge=1)


class ChecksSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    run: List[CheckName] = Field(default_factory=lambda: list(CheckName))
    expect: Dict[str, bool] = Field(default_factory=dict)

    @model_validator(mode="after")
    def expectations_are_run(self):
        names = {check.value for check in self.run}
        unknown = sorted(set(self.expect) - names)
        if unknown:
            raise ValueError(f"expectations for checks that are not run: {unknown}")
        return self


class ToleranceSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    jet: PositiveFloat = 1e-8
    fd: PositiveFloat = 1e-4
    agreement: PositiveFloat = 1e-5


class ClaimsSection(BaseModel):
    """Closed-form values a source document states for the surface, adjudicated by the checks."""
    model_config = ConfigDict(extra="forbid")

    umbilical_mu: Optional[str] = None


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    backend: Backend = Backend.both
    fd_step: PositiveFloat = 1e-2
    trace_step: PositiveFloat = 1e-2
    jobs: int = 1


class SurfaceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: Literal[1] = Field(SCHEMA_VERSION, alias="schema")
    name: str
    description: str = ""
    ambient: AmbientSection
    immersion: ImmersionSection
    domain: Dict[str, Tuple[float, float]]
    frame: FrameSection = Field(default_factory=FrameSection)
    grid: GridSection = Field(default_factory=GridSection)
    points: Optional[List[Tuple[float, float]]] = None
    checks: ChecksSection = Field(default_factory=ChecksSection)
    tolerance: ToleranceSection = Field(default_factory=ToleranceSection)
    run: RunSection = Field(default_factory=RunSection)
    claims: ClaimsSection = Field(default_factory=ClaimsSection)

    @model_validator(mode="after")
    def expressions_bind(self):
        try:
            immersion = self.immersion_model()
            for components in self.frame.pins.values():
                bind_field(components, immersion)
            self.claims_model()
        except SurfaceCheckError as e:
            raise ValueError(str(e)) from e
        for lo, hi in immersion.domain:
            if not lo <= hi:
                raise ValueError(f"empty domain interval [{lo}, {hi}]")
        if self.points is not None and not self.points:
            raise ValueError("points must not be empty")
        outside = [list(p) for p in self.points or () if not immersion.contains(p)]
        if outside:
            raise ValueError(f"points outside the domain box: {outside}")
        return self

    def parameters(self):
        if self.immersion.form == "graph":
            return tuple(self.immersion.free or ())
        return ("u1", "u2")

    def immersion_model(self):
        parameters = self.parameters()
        missing = [name for name in parameters if name not in self.domain]
        if missing:
            raise ValueError(f"domain is missing intervals for {missing}")
        domain = [self.domain[name] for name in parameters]
        if self.immersion.form == "graph":
            return graph_immersion(parameters, self.immersion.coordinates, domain)
        names = ("x1", "x2", "x3", "x4")
        missing = [name for name in names if name not in self.immersion.coordinates]
        if missing:
            raise ValueError(f"parametric immersion is missing {missing}")
        return parametric_immersion([self.immersion.coordinates[name] for name in names], domain)

    def claims_model(self):
        """Bound claim expressions by name, only for the claims that are set."""
        immersion = self.immersion_model()
        return {
            name: bind_scalar(text, immersion)
            for name, text in self.claims.model_dump().items()
            if text is not None
        }

    def metric(self):
        return AmbientMetric(tuple(self.ambient.signs))

    def frame_options(self, backend=Backend.jet, gauge=1.0):
        immersion = self.immersion_model()
        pins = {name: bind_field(components, immersion) for name, components in self.frame.pins.items()}
        return FrameOptions(backend=Backend(backend), pins=pins or None, gauge=gauge, fd_step=self.run.fd_step)

    def sample(self):
        """Sample points: the explicit list, or an n1 x n2 grid over the domain box."""
        if self.points is not None:
            return [tuple(map(float, p)) for p in self.points]
        (lo1, hi1), (lo2, hi2) = self.immersion_model().domain
        return [
            (float(a), float(b))
            for a in np.linspace(lo1, hi1, self.grid.n1)
            for b in np.linspace(lo2, hi2, self.grid.n2)
        ]


def _format_validation(error, path):
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{path}: {location}: {first['msg']}"


def parse_config(data, path="<config>"):
    if not isinstance(data, dict) or not data:
        raise ConfigError(f"{path}: empty or non-mapping surface definition")
    try:
        return SurfaceConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_validation(e, path)) from e


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f" line {mark.line + 1} column {mark.column + 1}" if mark is not None else ""
        raise ConfigError(f"{path}:{where} {getattr(e, 'problem', None) or e}") from e
    config = parse_config(data, path)
    logger.info("loaded surface '%s' from %s", config.name, path)
    return config
