"""Pydantic schemas for the slitmap module: image slit domains, level curves, diagnostics."""

from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.modules.geometry.schemas import PlanePoint


class ChordalSlit(BaseModel):
    """Horizontal slit {x + i·height : x_min ≤ x ≤ x_max}, image of hole ``hole_index``."""

    model_config = ConfigDict(frozen=True)

    hole_index: int
    height: float
    x_min: float
    x_max: float
    flatness: float

    @property
    def aspect(self) -> float:
        return (self.x_max - self.x_min) / self.height


class ChordalSlitDomain(BaseModel):
    """Upper half-plane minus horizontal slits."""

    model_config = ConfigDict(frozen=True)

    slits: Tuple[ChordalSlit, ...] = ()
    condition: float = 1.0
    injective: bool = True


class CircularArc(BaseModel):
    """Arc of the circle |ζ| = radius between two angles, image of hole ``hole_index``."""

    model_config = ConfigDict(frozen=True)

    hole_index: int
    radius: float
    angle_min: float
    angle_max: float
    radial_deviation: float


class CircularSlitRing(BaseModel):
    """Annulus ρ < |ζ| < 1 minus concentric arcs; hole ``hole_index`` maps onto |ζ| = ρ."""

    model_config = ConfigDict(frozen=True)

    hole_index: int
    inner_radius: float
    arcs: Tuple[CircularArc, ...] = ()


class CircularSlitDisk(BaseModel):
    """Unit disk minus concentric arcs; the map sends ``center`` to 0."""

    model_config = ConfigDict(frozen=True)

    center: PlanePoint
    arcs: Tuple[CircularArc, ...] = ()


class LevelCurve(BaseModel):
    """Traced level set {field = level} as a closed point sequence.

    When the level set runs into a boundary singularity of the field the curve
    is closed through that point and ``through_pole`` records it.
    """

    model_config = ConfigDict(frozen=True)

    level: float
    points: Tuple[Tuple[float, float], ...]
    closure_gap: float
    simple: bool
    through_pole: Optional[PlanePoint] = None

    @property
    def array(self) -> np.ndarray:
        pts = np.array(self.points, dtype=float)
        return pts[:, 0] + 1j * pts[:, 1]


class FieldDiagnostics(BaseModel):
    """Gradient and sublevel-set connectivity report for a field on a grid."""

    model_config = ConfigDict(frozen=True)

    grid_shape: Tuple[int, int]
    min_gradient: float
    flagged: bool
    levels: Tuple[float, ...] = ()
    component_counts: Tuple[int, ...] = ()
