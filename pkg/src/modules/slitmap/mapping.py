"""Conformal maps assembled from ER fields and their path-integrated conjugates.

Chordal:   f = u + i·v with v = H^{ER}(·, w); f(w) = ∞, holes go to horizontal slits.
Bilateral: f = exp(−(u + i·ψ)) with u = π·G^{ER}(A_i, ·); ∂A₀ → |ζ| = 1, A_i → |ζ| = ρ.
Radial:    f = exp(−(u + i·ψ)) with u = π·G^{ER}(z₀, ·); f(z₀) = 0.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from src.core.config import settings
from src.core.errors import PathTooCloseToBoundary
from src.modules.bm_kernels.fields import HarmonicField
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain
from src.modules.slitmap.conjugate import SpokeNetwork, clearance, integrate_segments
from src.modules.slitmap.models import ConjugateRole, MapKind

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
ANCHOR_DEPTH = 0.1
WAYPOINTS_PER_COLLAR = 64
EXTREMUM_TOLERANCE = 1e-10


class AnalyticMapField:
    """Holomorphic map f evaluated by conjugating a harmonic field from an anchor.

    Chordal maps take the field as Im f and pin Re f(anchor) = ``pinned``;
    exponential maps take the field as the real part of the exponent.
    """

    def __init__(
        self,
        kind: MapKind,
        field: HarmonicField,
        domain: Domain,
        anchor: complex,
        waypoints: Sequence[np.ndarray] = (),
        pinned: float = 0.0,
        exclusion: Optional[Tuple[complex, float]] = None,
        zero: Optional[complex] = None,
    ):
        self.kind = kind
        self.field = field
        self.domain = domain
        self.anchor = complex(anchor)
        self.pinned = float(pinned)
        self.exclusion = exclusion
        self.zero = zero
        self.role = ConjugateRole.IMAGINARY if kind is MapKind.CHORDAL else ConjugateRole.REAL
        self.scale = geometry.diameter(domain)
        self.network = SpokeNetwork(field, self.role, domain, self.anchor, waypoints)

    def _check(self, z: np.ndarray) -> None:
        if self.exclusion is None:
            return
        point, radius = self.exclusion
        if np.any(np.abs(z - point) < radius):
            raise PathTooCloseToBoundary(
                f"map evaluation refused within {radius:.1e} of the point at infinity {point}"
            )

    def conjugate(self, z) -> np.ndarray:
        """Conjugate of the field at ``z``, pinned at the anchor."""
        z = np.asarray(z, dtype=complex)
        self._check(np.atleast_1d(z))
        return self.pinned + self.network.conjugate(z)

    def potential(self, z) -> np.ndarray:
        """u + i·v for chordal maps; u + i·ψ (the exponent of f) otherwise."""
        z = np.asarray(z, dtype=complex)
        conjugate = self.conjugate(z)
        value = np.asarray(self.field.value(z)).reshape(conjugate.shape)
        if self.kind is MapKind.CHORDAL:
            return conjugate + 1j * value
        return value + 1j * conjugate

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        flat = np.atleast_1d(z).ravel()
        out = np.zeros(flat.size, dtype=complex)
        live = np.ones(flat.size, dtype=bool)
        if self.zero is not None:
            live = np.abs(flat - self.zero) > 1e-14 * self.scale
        if np.any(live):
            potential = self.potential(flat[live])
            out[live] = potential if self.kind is MapKind.CHORDAL else np.exp(-potential)
        return out.reshape(shape) if shape else complex(out[0])

    def cauchy_riemann_residual(self, points, step: Optional[float] = None) -> float:
        """max |∂x Re − ∂y Im| + |∂y Re + ∂x Im| of the exponent on centred stencils."""
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        h = 1e-4 * self.scale if step is None else float(step)
        gradient = self.field.gradient(points)
        conj_x = self.conjugate(points + h) - self.conjugate(points - h)
        conj_y = self.conjugate(points + 1j * h) - self.conjugate(points - 1j * h)
        if self.kind is not MapKind.CHORDAL:
            conj_x = np.angle(np.exp(1j * conj_x))
            conj_y = np.angle(np.exp(1j * conj_y))
        conj_x, conj_y = conj_x / (2 * h), conj_y / (2 * h)
        if self.kind is MapKind.CHORDAL:
            # Re = conjugate, Im = field
            residual = np.abs(conj_x - gradient.imag) + np.abs(conj_y + gradient.real)
        else:
            # Re = field, Im = conjugate
            residual = np.abs(gradient.real - conj_y) + np.abs(gradient.imag + conj_x)
        return float(np.max(residual))


# ============================================================================
# ANCHORS AND WAYPOINTS
# ============================================================================


def inward_anchor(domain: Domain, t: float, poles: Sequence[complex] = ()) -> complex:
    """Point at depth 0.1·diameter along the inward normal at γ₀(t).

    The depth halves until the point clears the boundary and every pole by
    1e-2·diameter; the parameter shifts by quarter turns if that never happens.
    """
    scale = geometry.diameter(domain)
    for shift in (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi):
        g = geometry.boundary_geometry(domain, 0, float((t + shift) % TWO_PI))
        depth = ANCHOR_DEPTH * scale
        for _ in range(6):
            point = g.point.as_complex() + depth * g.normal.as_complex()
            if clearance(domain, poles, [point])[0] >= 1e-2 * scale:
                return complex(point)
            depth *= 0.5
    raise PathTooCloseToBoundary("no anchor point clears the boundary near the outer curve")


def collar_waypoints(domain: Domain, factor: Optional[float] = None) -> Tuple[np.ndarray, ...]:
    """Samples on every collar, used as network nodes that route around holes."""
    factor = settings.COLLAR if factor is None else factor
    rings = []
    for i in range(1, domain.n + 1):
        collar = geometry.collar_curve(domain, i, factor)
        _, z = geometry.sample_curve(collar.curve, WAYPOINTS_PER_COLLAR)
        rings.append(z)
    return tuple(rings)


# ============================================================================
# BOUNDARY PROFILES
# ============================================================================


class BoundaryProfile:
    """Conjugate along one boundary component: drift·t plus a trigonometric part."""

    def __init__(self, component: int, t: np.ndarray, rate: np.ndarray, entry_t: float, entry_value: float):
        count = t.size
        self.component = component
        self.t = t
        self._k = np.fft.fftfreq(count, 1.0 / count)
        spectrum = np.fft.fft(rate) / count
        if count % 2 == 0:
            spectrum[count // 2] = 0.0
        self.drift = float(spectrum[0].real)
        safe = np.where(self._k == 0, 1.0, self._k)
        self._coefficients = np.where(self._k == 0, 0.0, spectrum / (1j * safe))
        self._offset = float(entry_value) - float(self._raw(np.array([entry_t]))[0])
        self.values = self(t)

    def _raw(self, t: np.ndarray) -> np.ndarray:
        return (np.exp(1j * np.outer(t, self._k)) @ self._coefficients).real + self.drift * t

    def __call__(self, t) -> np.ndarray:
        return self._raw(np.atleast_1d(np.asarray(t, dtype=float))) + self._offset

    @property
    def period(self) -> float:
        return TWO_PI * self.drift

    def _extremum(self, sign: float) -> float:
        values = sign * self.values
        j = int(np.argmin(values))
        h = TWO_PI / self.t.size
        bracket = (self.t[j] - h, self.t[j], self.t[j] + h)
        try:
            result = minimize_scalar(
                lambda s: sign * float(self(s)[0]), bracket=bracket, method="golden", tol=EXTREMUM_TOLERANCE
            )
            return sign * float(min(result.fun, values[j]))
        except ValueError:
            return float(self.values[j])

    def extremes(self) -> Tuple[float, float]:
        """(min, max) over the component, refined by golden-section search."""
        return self._extremum(1.0), self._extremum(-1.0)


def boundary_profile(map_field: AnalyticMapField, component: int) -> BoundaryProfile:
    """Conjugate of the map's field along a hole boundary.

    The value at one entry point comes from the network plus a short segment
    from a point off the hole; the rest follows from integrating the boundary
    gradient in t.
    """
    domain = map_field.domain
    curve = domain.component(component)
    t = geometry.parameter_grid(curve.node_count)
    _, d1, _ = geometry.evaluate_curve(curve, t)
    _, gradient = map_field.field.boundary(component, t)
    rate = np.imag(np.conj(gradient) * d1)
    if map_field.role is ConjugateRole.IMAGINARY:
        rate = -rate

    depth = 0.25 * geometry.hole_clearance(domain, component)
    best, best_clearance = None, -np.inf
    for entry in (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi):
        g = geometry.boundary_geometry(domain, component, entry)
        point = g.point.as_complex()
        offset = point + depth * g.normal.as_complex()
        c = clearance(domain, map_field.field.poles, [offset])[0]
        if c > best_clearance:
            best, best_clearance = (entry, point, offset), c
    entry, point, offset = best
    start_value = float(np.atleast_1d(map_field.conjugate(offset))[0])
    step = integrate_segments(
        map_field.field,
        map_field.role,
        np.array([offset]),
        np.array([point]),
        np.array([depth]),
        np.array([depth]),
    )[0]
    return BoundaryProfile(component, t, rate, entry, start_value + step)


def injectivity_smoke_test(map_field: AnalyticMapField, count: int = 100, seed: Optional[int] = None) -> bool:
    """True when f separates ``count`` random pairs of interior points."""
    domain = map_field.domain
    scale = map_field.scale
    rng = np.random.default_rng(settings.SEED if seed is None else seed)
    _, outline = geometry.sample_curve(domain.outer, 512)
    points = []
    poles = list(map_field.field.poles)
    while len(points) < 2 * count:
        batch = (
            rng.uniform(outline.real.min(), outline.real.max(), 4 * count)
            + 1j * rng.uniform(outline.imag.min(), outline.imag.max(), 4 * count)
        )
        ok = clearance(domain, poles, batch) >= 0.02 * scale
        if map_field.exclusion is not None:
            ok &= np.abs(batch - map_field.exclusion[0]) >= 0.1 * scale
        points.extend(batch[ok].tolist())
    points = np.array(points[: 2 * count])
    images = np.asarray(map_field(points))
    first, second = images[:count], images[count:]
    tolerance = 1e-9 * (1.0 + np.maximum(np.abs(first), np.abs(second)))
    distinct = bool(np.all(np.abs(first - second) > tolerance))
    logger.info("injectivity smoke test on %d pairs: %s", count, "passed" if distinct else "failed")
    return distinct
