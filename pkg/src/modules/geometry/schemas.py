"""Pydantic schemas for the geometry module.

Curves and domains are immutable value objects: they are hashable, so solved
objects downstream can be cached per domain, and safe to share across workers.
"""

import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.modules.geometry.models import CurveKind, DomainIssue


class PlanePoint(BaseModel):
    """A point of the complex plane."""

    model_config = ConfigDict(frozen=True)

    re: float
    im: float

    @field_validator("re", "im")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("coordinates must be finite")
        return value

    @classmethod
    def from_complex(cls, z: complex) -> "PlanePoint":
        return cls(re=float(z.real), im=float(z.imag))

    def as_complex(self) -> complex:
        return complex(self.re, self.im)


class SmoothClosedCurve(BaseModel):
    """Counterclockwise smooth Jordan curve parameterized over [0, 2π).

    circle:  center + radius·e^{it}
    ellipse: center + e^{i·rotation}(a·cos t + i·b·sin t)
    fourier: center + Σ_{k=-K..K} c_k e^{ikt}, coefficients stored as (re, im)
    """

    model_config = ConfigDict(frozen=True)

    kind: CurveKind
    center: PlanePoint
    radius: Optional[float] = None
    semi_axes: Optional[Tuple[float, float]] = None
    rotation: float = 0.0
    coefficients: Tuple[Tuple[float, float], ...] = ()
    node_count: int = Field(default=256, ge=8)

    @property
    def mode_count(self) -> int:
        return (len(self.coefficients) - 1) // 2


class Domain(BaseModel):
    """Outer curve ∂A₀ plus hole curves ∂A₁..∂Aₙ.

    Component index 0 is the outer curve; index i ≥ 1 is hole i.
    """

    model_config = ConfigDict(frozen=True)

    outer: SmoothClosedCurve
    holes: Tuple[SmoothClosedCurve, ...] = ()

    @property
    def n(self) -> int:
        return len(self.holes)

    @property
    def components(self) -> Tuple[SmoothClosedCurve, ...]:
        return (self.outer,) + tuple(self.holes)

    def component(self, index: int) -> SmoothClosedCurve:
        return self.components[index]


class CollarCurve(BaseModel):
    """Smooth Jordan curve η_i in D encircling exactly hole i."""

    model_config = ConfigDict(frozen=True)

    hole_index: int = Field(ge=1)
    curve: SmoothClosedCurve
    factor: float
    offset: float


class CurveGeometry(BaseModel):
    """Point, unit tangent, unit normal and speed at one parameter value."""

    model_config = ConfigDict(frozen=True)

    point: PlanePoint
    tangent: PlanePoint
    normal: PlanePoint
    speed: float


class ValidityIssue(BaseModel):
    """One violated domain invariant and the components involved."""

    model_config = ConfigDict(frozen=True)

    issue: DomainIssue
    components: Tuple[int, ...]
    message: str


class ValidityReport(BaseModel):
    """Result of validate_domain; empty iff the domain is valid."""

    model_config = ConfigDict(frozen=True)

    issues: Tuple[ValidityIssue, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.issues

    def codes(self) -> Tuple[str, ...]:
        return tuple(item.issue.value for item in self.issues)
