"""Slitmap Service - Canonical Conformal Maps and Level Curves (Public Interface).

This is the PUBLIC INTERFACE of the slitmap module. Other modules must ONLY
import from this file (and schemas.py / models.py for types).

Every map is a harmonic field plus its conjugate, integrated along straight
segments from an anchor through a cached spoke network. Slit data comes from
the field's plateau values and from the conjugate along each hole.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.config import settings
from src.core.errors import InputError, PathTooCloseToBoundary, PlateauDegeneracy
from src.modules.bm_kernels.fields import HarmonicField
from src.modules.bm_kernels.schemas import BoundaryPoint
from src.modules.erbm import service as erbm
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain, PlanePoint
from src.modules.slitmap import mapping
from src.modules.slitmap.conjugate import clearance, integrate_path
from src.modules.slitmap.mapping import AnalyticMapField
from src.modules.slitmap.models import ConjugateRole, MapKind
from src.modules.slitmap.schemas import (
    ChordalSlit,
    ChordalSlitDomain,
    CircularArc,
    CircularSlitDisk,
    CircularSlitRing,
    FieldDiagnostics,
    LevelCurve,
)
from src.modules.slitmap.tracing import field_diagnostics, separation_check, trace_level_curve

logger = logging.getLogger(__name__)

PATH_CLEARANCE = 1e-3
INFINITY_EXCLUSION = 1e-2
PLATEAU_COINCIDENCE = 1e-9
_PATH_SAMPLES = np.linspace(0.0, 1.0, 65)

__all__ = [
    "harmonic_conjugate",
    "conjugate_period",
    "chordal_map",
    "bilateral_map",
    "radial_map",
    "boundary_correspondence",
    "trace_level_curve",
    "separation_check",
    "field_diagnostics",
    "FieldDiagnostics",
    "LevelCurve",
]


def _as_complex(z) -> complex:
    return z.as_complex() if isinstance(z, PlanePoint) else complex(z)


# ============================================================================
# HARMONIC CONJUGATE
# ============================================================================


def harmonic_conjugate(
    field: HarmonicField,
    z0,
    z,
    path: Sequence = (),
    role: ConjugateRole = ConjugateRole.IMAGINARY,
    domain: Optional[Domain] = None,
) -> float:
    """Change of the harmonic conjugate from ``z0`` to ``z`` along a polyline.

    Args:
        field: Harmonic field with a gradient evaluator
        z0: Start point
        z: End point (equal to z0 for a closed loop)
        path: Intermediate vertices
        role: IMAGINARY when field = Im f (returns Δ Re f), REAL when field = Re f
        domain: Domain to keep clear of (defaults to field.domain)

    Returns:
        float: Gauss–Legendre quadrature of the conjugate differential

    Raises:
        PathTooCloseToBoundary: Path within 1e-3·diameter of ∂D or a pole
    """
    domain = domain or field.domain
    vertices = np.array([_as_complex(z0)] + [_as_complex(p) for p in path] + [_as_complex(z)])
    if domain is not None:
        scale = geometry.diameter(domain)
    else:
        scale = max(1.0, float(np.max(np.abs(vertices - vertices[0]))))
    starts, ends = vertices[:-1], vertices[1:]
    samples = (starts[:, None] + _PATH_SAMPLES[None, :] * (ends - starts)[:, None]).ravel()
    closest = float(np.min(clearance(domain, field.poles, samples)))
    if closest < PATH_CLEARANCE * scale:
        raise PathTooCloseToBoundary(
            f"integration path comes within {closest:.3e} of the boundary or a singularity",
            {"clearance": closest, "required": PATH_CLEARANCE * scale},
        )
    return integrate_path(field, role, vertices, domain)


def conjugate_period(
    field: HarmonicField,
    domain: Domain,
    i: int,
    role: ConjugateRole = ConjugateRole.REAL,
    factor: Optional[float] = None,
    samples: int = 256,
) -> float:
    """Conjugate accumulated once around hole ``i`` along its collar polygon."""
    collar = geometry.collar_curve(domain, i, settings.COLLAR if factor is None else factor)
    _, ring = geometry.sample_curve(collar.curve, samples)
    return harmonic_conjugate(field, ring[0], ring[0], ring[1:], role, domain)


# ============================================================================
# CHORDAL MAP
# ============================================================================


def chordal_map(domain: Domain, w, factor: Optional[float] = None) -> Tuple[AnalyticMapField, ChordalSlitDomain]:
    """Map D onto the upper half-plane minus horizontal slits, with f(w) = ∞.

    Im f = H^{ER}(·, w). Re f is pinned to 0 at the point 0.1·diameter inside
    the outer curve at the parameter opposite w.

    Args:
        domain: Valid domain
        w: BoundaryPoint on the outer curve or its parameter
        factor: Collar factor

    Returns:
        tuple: (map, slit domain with heights c_i = H^{ER}(A_i, w))

    Raises:
        PlateauDegeneracy: Two slits at the same height with overlapping ranges
    """
    point = w if isinstance(w, BoundaryPoint) else BoundaryPoint(component=0, t=float(w))
    v = erbm.er_poisson_kernel(domain, point, factor)
    scale = geometry.diameter(domain)
    w_point = geometry.boundary_geometry(domain, 0, point.t).point.as_complex()
    anchor = mapping.inward_anchor(domain, point.t + np.pi, v.poles)
    map_field = AnalyticMapField(
        MapKind.CHORDAL,
        v,
        domain,
        anchor,
        mapping.collar_waypoints(domain, factor),
        exclusion=(w_point, INFINITY_EXCLUSION * scale),
    )

    slits = []
    for i in range(1, domain.n + 1):
        t = geometry.parameter_grid(domain.component(i).node_count)
        values, _ = v.boundary(i, t)
        profile = mapping.boundary_profile(map_field, i)
        x_min, x_max = profile.extremes()
        slits.append(
            ChordalSlit(
                hole_index=i,
                height=v.component_value(i),
                x_min=x_min,
                x_max=x_max,
                flatness=float(np.std(values)),
            )
        )
    for a in range(len(slits)):
        for b in range(a + 1, len(slits)):
            first, second = slits[a], slits[b]
            same_height = abs(first.height - second.height) <= PLATEAU_COINCIDENCE
            overlap = first.x_min <= second.x_max and second.x_min <= first.x_max
            if same_height and overlap:
                raise PlateauDegeneracy(
                    f"slits of holes {first.hole_index} and {second.hole_index} share height "
                    f"{first.height:.12g} with overlapping ranges",
                    {"holes": (first.hole_index, second.hole_index)},
                )

    injective = mapping.injectivity_smoke_test(map_field)
    logger.info("chordal map at w = %s: %d slits", w_point, len(slits))
    return map_field, ChordalSlitDomain(slits=tuple(slits), condition=v.condition, injective=injective)


# ============================================================================
# EXPONENTIAL MAPS
# ============================================================================


def _arc(map_field: AnalyticMapField, j: int, exponent: float) -> CircularArc:
    t = geometry.parameter_grid(map_field.domain.component(j).node_count)
    values, _ = map_field.field.boundary(j, t)
    radius = float(np.exp(-exponent))
    profile = mapping.boundary_profile(map_field, j)
    psi_min, psi_max = profile.extremes()
    return CircularArc(
        hole_index=j,
        radius=radius,
        angle_min=-psi_max,
        angle_max=-psi_min,
        radial_deviation=float(np.max(np.abs(np.exp(-values) - radius))),
    )


def bilateral_map(domain: Domain, i: int, factor: Optional[float] = None) -> Tuple[AnalyticMapField, CircularSlitRing]:
    """Map D onto an annulus ρ < |ζ| < 1 minus concentric arcs.

    f = exp(−(u + iψ)) with u = π·G^{ER}(A_i, ·): ∂A₀ goes to the unit circle,
    ∂A_i to |ζ| = ρ = exp(−π·c_i), every other hole to an arc.

    Raises:
        InputError: Domain without holes or i out of range
    """
    if domain.n < 1:
        raise InputError("the bilateral map needs at least one hole")
    green = erbm.er_green_component(domain, i, factor)
    u = np.pi * green
    anchor = mapping.inward_anchor(domain, 0.0, u.poles)
    map_field = AnalyticMapField(MapKind.BILATERAL, u, domain, anchor, mapping.collar_waypoints(domain, factor))
    arcs = tuple(
        _arc(map_field, j, np.pi * green.component_value(j)) for j in range(1, domain.n + 1) if j != i
    )
    inner = float(np.exp(-np.pi * green.component_value(i)))
    logger.info("bilateral map for hole %d: inner radius %.8f, %d arcs", i, inner, len(arcs))
    return map_field, CircularSlitRing(hole_index=i, inner_radius=inner, arcs=arcs)


def radial_map(domain: Domain, z0, factor: Optional[float] = None) -> Tuple[AnalyticMapField, CircularSlitDisk]:
    """Map D onto the unit disk minus concentric arcs with f(z0) = 0.

    f = exp(−(u + iψ)) with u = π·G^{ER}(z0, ·).

    Raises:
        PoleTooCloseToBoundary: z0 outside D or too close to ∂D
    """
    z0 = _as_complex(z0)
    green = erbm.er_green(domain, z0, factor)
    u = np.pi * green
    anchor = mapping.inward_anchor(domain, 0.0, u.poles)
    map_field = AnalyticMapField(
        MapKind.RADIAL, u, domain, anchor, mapping.collar_waypoints(domain, factor), zero=z0
    )
    arcs = tuple(_arc(map_field, j, np.pi * green.component_value(j)) for j in range(1, domain.n + 1))
    logger.info("radial map at z0 = %s: %d arcs", z0, len(arcs))
    return map_field, CircularSlitDisk(center=PlanePoint.from_complex(z0), arcs=arcs)


def boundary_correspondence(map_field: AnalyticMapField, samples: int = 256) -> float:
    """max ||f| − 1| over ``samples`` points of the outer curve."""
    if map_field.kind is MapKind.CHORDAL:
        raise InputError("the chordal map sends the outer curve to the real line, not the unit circle")
    t = geometry.parameter_grid(samples)
    values, _ = map_field.field.boundary(0, t)
    return float(np.max(np.abs(np.exp(-np.asarray(values)) - 1.0)))
