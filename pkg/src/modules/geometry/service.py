"""Geometry Service - Curves, Domains and Collars (Public Interface).

This is the PUBLIC INTERFACE of the geometry module. Other modules must ONLY
import from this file (and schemas.py for types), never from curves.py or
parser.py.

Normal convention: every normal returned here points INTO the domain. For a
standalone curve the domain is the enclosed region, so the normal is the left
normal i·T of the counterclockwise parameterization; on holes it is flipped.
"""

import functools
import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from src.core.config import settings
from src.core.errors import (
    ClearanceTooSmall,
    DegenerateCurve,
    DomainParseError,
    InputError,
    InvalidDomain,
    NonSimpleCurve,
)
from src.modules.geometry import curves, parser
from src.modules.geometry.models import CurveKind, DomainIssue
from src.modules.geometry.schemas import (
    CollarCurve,
    CurveGeometry,
    Domain,
    PlanePoint,
    SmoothClosedCurve,
    ValidityIssue,
    ValidityReport,
)

logger = logging.getLogger(__name__)

TWO_PI = curves.TWO_PI
MIN_SPEED_RATIO = 1e-9
MIN_CLEARANCE_RATIO = 1e-6
COLLAR_GAP_RATIO = 1e-2
_VALIDATION_SAMPLES = 1024

# ============================================================================
# CURVE CONSTRUCTION
# ============================================================================


def _check_curve(curve: SmoothClosedCurve) -> SmoothClosedCurve:
    count = settings.SELF_INTERSECTION_SEGMENTS
    t = curves.parameter_grid(count)
    z, d1, _ = curves.evaluate(curve, t)
    diameter = curves.point_set_diameter(z[:: max(1, count // 256)])
    min_speed = float(np.min(np.abs(d1)))
    if diameter <= 0 or min_speed <= MIN_SPEED_RATIO * diameter:
        raise DegenerateCurve(
            f"minimum speed {min_speed:.3e} below {MIN_SPEED_RATIO:g} x diameter",
            {"min_speed": min_speed, "diameter": diameter},
        )
    if curve.kind is CurveKind.FOURIER and curves.self_intersects(z):
        raise NonSimpleCurve(f"self-intersection found on {count} sampled segments")
    return curve


def make_curve(
    kind: Union[CurveKind, str],
    center: complex = 0j,
    *,
    radius: Optional[float] = None,
    semi_axes: Optional[Tuple[float, float]] = None,
    rotation: float = 0.0,
    coefficients: Optional[Sequence[complex]] = None,
    node_count: Optional[int] = None,
) -> SmoothClosedCurve:
    """Build a validated counterclockwise smooth closed curve.

    Args:
        kind: circle, ellipse or fourier
        center: Center (complex)
        radius: Circle radius
        semi_axes: Ellipse semi-axes (a, b)
        rotation: Ellipse rotation angle
        coefficients: Fourier coefficients c_{-K..K}
        node_count: Collocation nodes used by the solver

    Returns:
        SmoothClosedCurve: Curve satisfying simplicity, speed and orientation invariants

    Raises:
        DegenerateCurve: Non-finite or non-positive parameters, vanishing speed
        NonSimpleCurve: Sampled self-intersection
    """
    kind = CurveKind(kind)
    center = complex(center)
    node_count = int(node_count or settings.NODES)
    if not np.isfinite(center):
        raise DegenerateCurve("center must be finite")

    if kind is CurveKind.CIRCLE:
        if radius is None or not np.isfinite(radius) or radius <= 0:
            raise DegenerateCurve(f"circle radius must be positive, got {radius}")
        curve = SmoothClosedCurve(
            kind=kind,
            center=PlanePoint.from_complex(center),
            radius=float(radius),
            node_count=node_count,
        )
    elif kind is CurveKind.ELLIPSE:
        if semi_axes is None or not all(np.isfinite(semi_axes)) or min(semi_axes) <= 0:
            raise DegenerateCurve(f"ellipse semi-axes must be positive, got {semi_axes}")
        curve = SmoothClosedCurve(
            kind=kind,
            center=PlanePoint.from_complex(center),
            semi_axes=(float(semi_axes[0]), float(semi_axes[1])),
            rotation=float(rotation),
            node_count=node_count,
        )
    else:
        coeffs = np.asarray(coefficients if coefficients is not None else [], dtype=complex)
        if coeffs.size < 3 or coeffs.size % 2 == 0:
            raise DegenerateCurve("fourier curves need 2K+1 coefficients with K >= 1")
        if not np.all(np.isfinite(coeffs)):
            raise DegenerateCurve("fourier coefficients must be finite")
        probe = _fourier_curve(center, coeffs, node_count)
        if curves.signed_area(probe) < 0:
            # γ(−t) has coefficients c_{-k}
            coeffs = coeffs[::-1]
        curve = _fourier_curve(center, coeffs, node_count)

    return _check_curve(curve)


def _fourier_curve(center: complex, coeffs: np.ndarray, node_count: int) -> SmoothClosedCurve:
    return SmoothClosedCurve(
        kind=CurveKind.FOURIER,
        center=PlanePoint.from_complex(center),
        coefficients=tuple((float(c.real), float(c.imag)) for c in coeffs),
        node_count=node_count,
    )


def circle(cx: float, cy: float, r: float, node_count: Optional[int] = None) -> SmoothClosedCurve:
    return make_curve(CurveKind.CIRCLE, complex(cx, cy), radius=r, node_count=node_count)


def ellipse(
    cx: float, cy: float, a: float, b: float, rot: float = 0.0, node_count: Optional[int] = None
) -> SmoothClosedCurve:
    return make_curve(
        CurveKind.ELLIPSE, complex(cx, cy), semi_axes=(a, b), rotation=rot, node_count=node_count
    )


def fourier(
    cx: float, cy: float, coefficients: Sequence[complex], node_count: Optional[int] = None
) -> SmoothClosedCurve:
    return make_curve(
        CurveKind.FOURIER, complex(cx, cy), coefficients=coefficients, node_count=node_count
    )


# ============================================================================
# CURVE QUERIES
# ============================================================================


def evaluate_curve(curve: SmoothClosedCurve, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """γ(t), γ′(t), γ″(t) for an array of parameters."""
    return curves.evaluate(curve, t)


def parameter_grid(count: int) -> np.ndarray:
    """Equispaced trapezoid nodes 2πj/count, j = 0..count-1."""
    return curves.parameter_grid(count)


def polylines_intersect(first: np.ndarray, second: np.ndarray) -> bool:
    return curves.polylines_intersect(first, second)


def self_intersects(polyline: np.ndarray) -> bool:
    return curves.self_intersects(polyline)


def polyline_winding(polyline: np.ndarray, points) -> np.ndarray:
    """Winding number of a closed point sequence around each point."""
    return curves.winding_number(np.asarray(polyline, dtype=complex), points)


def sample_curve(curve: SmoothClosedCurve, count: int) -> Tuple[np.ndarray, np.ndarray]:
    return curves.sample(curve, count)


def curve_geometry(curve: SmoothClosedCurve, t: float, hole: bool = False) -> CurveGeometry:
    """Point, unit tangent, unit normal and speed at parameter ``t``.

    Args:
        curve: Any valid curve
        t: Parameter in [0, 2π)
        hole: When True the curve bounds a hole and the normal is flipped so
            that it still points into the domain

    Returns:
        CurveGeometry: Normal points into the domain side of the curve
    """
    z, d1, _ = curves.evaluate(curve, np.array([t]))
    speed = float(np.abs(d1[0]))
    tangent = d1[0] / speed
    normal = 1j * tangent
    if hole:
        normal = -normal
    return CurveGeometry(
        point=PlanePoint.from_complex(z[0]),
        tangent=PlanePoint.from_complex(tangent),
        normal=PlanePoint.from_complex(normal),
        speed=speed,
    )


def boundary_geometry(domain: Domain, component: int, t: float) -> CurveGeometry:
    """curve_geometry of a boundary component with the normal pointing into D."""
    return curve_geometry(domain.component(component), t, hole=component > 0)


def winding_number(curve: SmoothClosedCurve, points, samples: int = 2048) -> np.ndarray:
    """Pre-round argument-principle winding number of ``curve`` around each point."""
    _, z = curves.sample(curve, samples)
    return curves.winding_number(z, points)


def curve_diameter(curve: SmoothClosedCurve) -> float:
    return curves.curve_diameter(curve)


def diameter(domain: Domain) -> float:
    """Diameter of the outer curve (the domain's length scale)."""
    return curves.curve_diameter(domain.outer)


@functools.lru_cache(maxsize=64)
def interior_point(curve: SmoothClosedCurve) -> complex:
    """A point well inside the region enclosed by ``curve``."""
    center = curve.center.as_complex()
    _, z = curves.sample(curve, 1024)
    if round(float(curves.winding_number(z, [center])[0])) == 1:
        if np.min(np.abs(z - center)) > 1e-3 * curves.point_set_diameter(z[::4]):
            return center
    xs = np.linspace(z.real.min(), z.real.max(), 64)
    ys = np.linspace(z.imag.min(), z.imag.max(), 64)
    grid = (xs[None, :] + 1j * ys[:, None]).ravel()
    inside = np.round(curves.winding_number(z, grid)) == 1
    candidates = grid[inside]
    depth = np.min(np.abs(candidates[:, None] - z[None, ::4]), axis=1)
    return complex(candidates[np.argmax(depth)])


@functools.lru_cache(maxsize=32)
def boundary_locator(domain: Domain) -> curves.BoundaryLocator:
    """Cached nearest-point structure over every boundary component of ``domain``."""
    return curves.BoundaryLocator(domain.components)


def distance_to_boundary(domain: Domain, points):
    """Nearest boundary point for each query point.

    Returns:
        tuple: (distance, component index, curve parameter, projection) arrays
    """
    return boundary_locator(domain).query(points)


def contains(domain: Domain, points) -> np.ndarray:
    """True where points lie strictly inside the domain."""
    return boundary_locator(domain).inside(points)


# ============================================================================
# DOMAIN VALIDATION
# ============================================================================


def validate_domain(domain: Domain) -> ValidityReport:
    """Check every Domain invariant and list the violations.

    Errors are returned in the report, never raised.

    Args:
        domain: Domain to check

    Returns:
        ValidityReport: Empty iff the domain is valid
    """
    issues = []
    sampled = []
    for index, curve in enumerate(domain.components):
        try:
            _check_curve(curve)
        except NonSimpleCurve as e:
            issues.append(ValidityIssue(issue=DomainIssue.NON_SIMPLE_CURVE, components=(index,), message=str(e)))
        except DegenerateCurve as e:
            issues.append(ValidityIssue(issue=DomainIssue.DEGENERATE_CURVE, components=(index,), message=str(e)))
        if curves.signed_area(curve) <= 0:
            issues.append(
                ValidityIssue(
                    issue=DomainIssue.NOT_COUNTERCLOCKWISE,
                    components=(index,),
                    message="curve must be counterclockwise",
                )
            )
        sampled.append(curves.sample(curve, _VALIDATION_SAMPLES)[1])

    outer = sampled[0]
    scale = curves.point_set_diameter(outer[::4])
    for i in range(1, len(sampled)):
        hole = sampled[i]
        inside = np.round(curves.winding_number(outer, hole[::8])) == 1
        if not np.any(inside):
            issues.append(
                ValidityIssue(
                    issue=DomainIssue.HOLE_OUTSIDE_OUTER,
                    components=(i,),
                    message=f"hole {i} lies outside the outer curve",
                )
            )
            continue
        if not np.all(inside) or curves.polylines_intersect(outer, hole):
            issues.append(
                ValidityIssue(
                    issue=DomainIssue.HOLE_CROSSES_OUTER,
                    components=(0, i),
                    message=f"hole {i} crosses the outer curve",
                )
            )
            continue
        gap = curves.min_point_distance(hole, outer)
        if gap < MIN_CLEARANCE_RATIO * scale:
            issues.append(
                ValidityIssue(
                    issue=DomainIssue.INSUFFICIENT_CLEARANCE,
                    components=(0, i),
                    message=f"hole {i} clearance {gap:.3e} to the outer curve",
                )
            )

    for i in range(1, len(sampled)):
        for j in range(i + 1, len(sampled)):
            first, second = sampled[i], sampled[j]
            nested = (
                round(float(curves.winding_number(first, second[:1])[0])) != 0
                or round(float(curves.winding_number(second, first[:1])[0])) != 0
            )
            if nested or curves.polylines_intersect(first, second):
                issues.append(
                    ValidityIssue(
                        issue=DomainIssue.HOLES_INTERSECT,
                        components=(i, j),
                        message=f"holes {i} and {j} have overlapping closures",
                    )
                )
                continue
            gap = curves.min_point_distance(first, second)
            if gap < MIN_CLEARANCE_RATIO * scale:
                issues.append(
                    ValidityIssue(
                        issue=DomainIssue.INSUFFICIENT_CLEARANCE,
                        components=(i, j),
                        message=f"holes {i} and {j} clearance {gap:.3e}",
                    )
                )

    return ValidityReport(issues=tuple(issues))


def require_valid(domain: Domain) -> Domain:
    """Raise InvalidDomain unless validate_domain returns an empty report."""
    report = validate_domain(domain)
    if not report.valid:
        raise InvalidDomain(
            "; ".join(item.message for item in report.issues),
            {"issues": report.codes(), "components": [item.components for item in report.issues]},
        )
    return domain


# ============================================================================
# COLLARS
# ============================================================================


def hole_clearance(domain: Domain, i: int) -> float:
    """Minimal distance from ∂A_i to every other boundary component."""
    hole = domain.holes[i - 1]
    others = tuple(c for k, c in enumerate(domain.components) if k != i)
    locator = curves.BoundaryLocator(others)
    count = settings.SELF_INTERSECTION_SEGMENTS
    t, z = curves.sample(hole, count)
    dist, _, _, _ = locator.query(z)
    best = int(np.argmin(dist))
    dt = TWO_PI / count

    def objective(s: float) -> float:
        point, _, _ = curves.evaluate(hole, np.array([s]))
        return float(locator.query(point)[0][0])

    refined = minimize_scalar(
        objective,
        bounds=(t[best] - dt, t[best] + dt),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(min(dist[best], refined.fun))


@functools.lru_cache(maxsize=128)
def collar_curve(domain: Domain, i: int, factor: Optional[float] = None) -> CollarCurve:
    """Collar η_i: outward offset of ∂A_i re-smoothed onto Fourier modes.

    Args:
        domain: Valid domain
        i: Hole index 1..n
        factor: Fraction of the hole's clearance used as offset, in (0, 1)

    Returns:
        CollarCurve: Winding 1 around hole i, 0 around other holes, inside D

    Raises:
        ClearanceTooSmall: Factor out of range or offset curve too close to the boundary
    """
    factor = settings.COLLAR if factor is None else float(factor)
    if not 0.0 < factor < 1.0:
        raise ClearanceTooSmall(f"collar factor must lie in (0, 1), got {factor}")
    if not 1 <= i <= domain.n:
        raise InputError(f"hole index {i} out of range 1..{domain.n}")

    hole = domain.holes[i - 1]
    clearance = hole_clearance(domain, i)
    offset = factor * clearance
    modes = settings.FOURIER_MODES
    count = max(4 * modes, 256)
    t = curves.parameter_grid(count)
    z, d1, _ = curves.evaluate(hole, t)
    outward = -1j * d1 / np.abs(d1)
    c0, coeffs = curves.fourier_fit(z + offset * outward, modes)
    curve = _fourier_curve(c0, coeffs, hole.node_count)

    _, samples = curves.sample(curve, 1024)
    scale = diameter(domain)
    floor = COLLAR_GAP_RATIO * scale
    gaps, _, _, _ = boundary_locator(domain).query(samples)
    if curves.self_intersects(samples) or float(np.min(gaps)) < floor:
        raise ClearanceTooSmall(
            f"collar of hole {i} leaves gap {float(np.min(gaps)):.3e} < {floor:.3e}",
            {"hole": i, "factor": factor, "clearance": clearance},
        )
    for k, other in enumerate(domain.holes, start=1):
        wind = round(float(curves.winding_number(samples, [interior_point(other)])[0]))
        if wind != (1 if k == i else 0):
            raise ClearanceTooSmall(
                f"collar of hole {i} has winding {wind} around hole {k}",
                {"hole": i, "factor": factor},
            )
    for component in domain.components:
        if curves.polylines_intersect(samples, curves.sample(component, 1024)[1]):
            raise ClearanceTooSmall(f"collar of hole {i} crosses the boundary", {"hole": i})

    logger.debug("collar %d: clearance %.6f offset %.6f", i, clearance, offset)
    return CollarCurve(hole_index=i, curve=curve, factor=factor, offset=offset)


# ============================================================================
# DOMAIN FILES AND TRANSFORMS
# ============================================================================


def _curve_from_statement(statement: parser.CurveStatement, node_count: int) -> SmoothClosedCurve:
    values = statement.values
    center = complex(values[0], values[1])
    if statement.kind is CurveKind.CIRCLE:
        return make_curve(statement.kind, center, radius=values[2], node_count=node_count)
    if statement.kind is CurveKind.ELLIPSE:
        return make_curve(
            statement.kind,
            center,
            semi_axes=(values[2], values[3]),
            rotation=values[4],
            node_count=node_count,
        )
    pairs = values[3:]
    coeffs = [complex(pairs[k], pairs[k + 1]) for k in range(0, len(pairs), 2)]
    return make_curve(statement.kind, center, coefficients=coeffs, node_count=node_count)


def parse_domain(
    text: str, source: str = "<string>", node_count: Optional[int] = None
) -> Tuple[Domain, Dict[int, int]]:
    """Parse a domain file.

    Args:
        text: File contents
        source: Name used in diagnostics
        node_count: Collocation nodes per curve (default from settings)

    Returns:
        tuple: (Domain, mapping component index -> 1-based source line)

    Raises:
        DomainParseError: Syntax errors and invalid curve parameters, with line numbers
    """
    node_count = int(node_count or settings.NODES)
    statements = parser.parse_statements(text, source)
    outer_statement = next(s for s in statements if s.role == "outer")
    hole_statements = [s for s in statements if s.role == "hole"]
    built = []
    for statement in [outer_statement] + hole_statements:
        try:
            built.append(_curve_from_statement(statement, node_count))
        except (DegenerateCurve, NonSimpleCurve) as e:
            raise DomainParseError(
                f"{source}: line {statement.line}: {e}",
                {"line": statement.line, "cause": e.code},
            ) from e
    domain = Domain(outer=built[0], holes=tuple(built[1:]))
    lines = {0: outer_statement.line}
    lines.update({k: s.line for k, s in enumerate(hole_statements, start=1)})
    return domain, lines


def load_domain(path: Union[str, Path], node_count: Optional[int] = None) -> Tuple[Domain, Dict[int, int]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DomainParseError(f"cannot read domain file {path}: {e}", {"line": 0}) from e
    return parse_domain(text, str(path), node_count)


def _transform_curve(curve: SmoothClosedCurve, factor: complex, shift: complex) -> SmoothClosedCurve:
    center = PlanePoint.from_complex(factor * curve.center.as_complex() + shift)
    scale = abs(factor)
    if curve.kind is CurveKind.CIRCLE:
        return curve.model_copy(update={"center": center, "radius": curve.radius * scale})
    if curve.kind is CurveKind.ELLIPSE:
        a, b = curve.semi_axes
        return curve.model_copy(
            update={
                "center": center,
                "semi_axes": (a * scale, b * scale),
                "rotation": curve.rotation + float(np.angle(factor)),
            }
        )
    _, coeffs = curves.fourier_modes(curve)
    moved = factor * coeffs
    return curve.model_copy(
        update={
            "center": center,
            "coefficients": tuple((float(c.real), float(c.imag)) for c in moved),
        }
    )


def transform_domain(
    domain: Domain, scale: float = 1.0, rotation: float = 0.0, shift: complex = 0j
) -> Domain:
    """Image of ``domain`` under z ↦ scale·e^{i·rotation}·z + shift."""
    if scale <= 0:
        raise InputError("scale must be positive")
    factor = scale * np.exp(1j * rotation)
    return Domain(
        outer=_transform_curve(domain.outer, factor, complex(shift)),
        holes=tuple(_transform_curve(h, factor, complex(shift)) for h in domain.holes),
    )
