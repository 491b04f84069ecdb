"""Level-curve continuation and sublevel diagnostics for harmonic fields."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq

from src.core.errors import (
    CurveTouchesBoundary,
    GradientVanished,
    InputError,
    MaxStepsExceeded,
    PlateauLevel,
)
from src.modules.bm_kernels.fields import HarmonicField
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain, PlanePoint
from src.modules.slitmap.schemas import FieldDiagnostics, LevelCurve

logger = logging.getLogger(__name__)

PLATEAU_TOLERANCE = 1e-6
NEWTON_TOLERANCE = 1e-10
MIN_GRADIENT = 1e-8
MAX_STEPS = 20000
MAX_STEP_RATIO = 0.02
POLE_STOP_RATIO = 2e-3
TURN_MAX = 0.1
TURN_MIN = 0.02
SEARCH_GRID = 48


class _Tracer:
    """Predictor–corrector walk along {field = level}."""

    def __init__(self, field: HarmonicField, level: float, domain: Domain):
        self.field = field
        self.level = level
        self.domain = domain
        self.scale = geometry.diameter(domain)
        self.max_step = MAX_STEP_RATIO * self.scale
        self.poles = np.array(field.poles, dtype=complex)
        self.steps = 0

    def gradient(self, z: complex) -> complex:
        g = complex(np.atleast_1d(self.field.gradient(np.array([z])))[0])
        if abs(g) < MIN_GRADIENT:
            raise GradientVanished(f"|∇field| = {abs(g):.3e} at {z}", {"point": str(z)})
        return g

    def correct(self, z: complex) -> Optional[complex]:
        for _ in range(12):
            value, gradient = self.field.evaluate(np.array([z]))
            residual = float(value[0]) - self.level
            if abs(residual) < NEWTON_TOLERANCE:
                return z
            g = complex(gradient[0])
            if abs(g) < MIN_GRADIENT:
                raise GradientVanished(f"|∇field| = {abs(g):.3e} at {z}")
            z = z - residual * g / abs(g) ** 2
        return None

    def pole_distance(self, z: complex) -> Tuple[float, Optional[complex]]:
        if self.poles.size == 0:
            return np.inf, None
        d = np.abs(self.poles - z)
        k = int(np.argmin(d))
        return float(d[k]), complex(self.poles[k])

    def walk(self, start: complex, direction: float, stop_at: Optional[complex]) -> Tuple[list, Optional[complex]]:
        """Trace from ``start``; stop on closure near ``stop_at`` or at a pole.

        Returns:
            tuple: (points after start, pole reached or None)
        """
        points = []
        z = start
        step = 0.25 * self.max_step
        travelled = 0.0
        tangent = direction * -1j * self.gradient(z)
        tangent /= abs(tangent)
        while True:
            self.steps += 1
            if self.steps > MAX_STEPS:
                raise MaxStepsExceeded(f"level {self.level} not closed after {MAX_STEPS} steps")
            distance, pole = self.pole_distance(z)
            if distance < POLE_STOP_RATIO * self.scale:
                return points, pole
            step = min(step, self.max_step, 0.25 * distance)
            if stop_at is not None and travelled > 4 * self.max_step and abs(z - stop_at) <= 1.5 * step:
                return points, None
            candidate = self.correct(z + step * tangent)
            if candidate is None:
                step *= 0.5
                continue
            new_tangent = direction * -1j * self.gradient(candidate)
            new_tangent /= abs(new_tangent)
            turn = abs(np.angle(new_tangent / tangent))
            if turn > TURN_MAX and step > 1e-6 * self.scale:
                step *= 0.5
                continue
            if not bool(geometry.contains(self.domain, [candidate])[0]):
                raise CurveTouchesBoundary(
                    f"level {self.level} reaches the boundary at {candidate}", {"point": str(candidate)}
                )
            travelled += abs(candidate - z)
            z, tangent = candidate, new_tangent
            points.append(z)
            if turn < TURN_MIN:
                step *= 1.5


def _plateaus(field: HarmonicField) -> Sequence[float]:
    return tuple(getattr(field, "constants", ()))


def _search_grid(domain: Domain, resolution: int, poles: Sequence[complex], margin: float, pole_margin: float):
    _, outline = geometry.sample_curve(domain.outer, 512)
    xs = np.linspace(outline.real.min(), outline.real.max(), resolution)
    ys = np.linspace(outline.imag.min(), outline.imag.max(), resolution)
    grid = xs[None, :] + 1j * ys[:, None]
    flat = grid.ravel()
    dist, _, _, _ = geometry.distance_to_boundary(domain, flat)
    mask = geometry.contains(domain, flat) & (dist >= margin)
    for pole in poles:
        mask &= np.abs(flat - pole) >= pole_margin
    return grid, mask.reshape(grid.shape)


def find_level_point(field: HarmonicField, level: float, domain: Domain, resolution: int = SEARCH_GRID) -> complex:
    """A point on {field = level} from a sign change on a grid, refined by brentq."""
    scale = geometry.diameter(domain)
    grid, mask = _search_grid(domain, resolution, field.poles, 1e-3 * scale, 1e-2 * scale)
    values = np.full(grid.shape, np.nan)
    values[mask] = np.asarray(field.value(grid[mask])) - level
    left, right = values[:, :-1], values[:, 1:]
    crossing = mask[:, :-1] & mask[:, 1:] & (np.sign(left) != np.sign(right))
    rows, cols = np.nonzero(crossing)
    if rows.size == 0:
        raise InputError(f"no point of level {level} found on a {resolution}x{resolution} grid")
    a, b = grid[rows[0], cols[0]], grid[rows[0], cols[0] + 1]

    def along(s: float) -> float:
        return float(np.atleast_1d(field.value(np.array([a + s * (b - a)])))[0]) - level

    s = brentq(along, 0.0, 1.0, xtol=1e-14)
    return complex(a + s * (b - a))


def trace_level_curve(
    field: HarmonicField,
    r: float,
    domain: Optional[Domain] = None,
    plateaus: Optional[Sequence[float]] = None,
    start: Optional[complex] = None,
) -> LevelCurve:
    """Trace the closed level curve {field = r}.

    Args:
        field: Harmonic field with a gradient evaluator
        r: Level, positive
        domain: Domain of the field (defaults to field.domain)
        plateaus: Values the field takes on holes (defaults to field.constants)
        start: A point near the level set; found on a grid when omitted

    Returns:
        LevelCurve: Closed point sequence; a curve that runs into a boundary
            singularity is closed through it

    Raises:
        PlateauLevel: r within 1e-6 of a plateau value
        GradientVanished: |∇field| < 1e-8 on the curve
        CurveTouchesBoundary: The trace leaves the domain
        MaxStepsExceeded: No closure within the allowed number of steps
    """
    domain = domain or field.domain
    if domain is None:
        raise InputError("tracing needs the field's domain")
    if not r > 0:
        raise InputError(f"level must be positive, got {r}")
    plateaus = _plateaus(field) if plateaus is None else tuple(plateaus)
    for c in plateaus:
        if abs(r - c) <= PLATEAU_TOLERANCE:
            raise PlateauLevel(f"level {r} is within {PLATEAU_TOLERANCE:g} of the plateau value {c}")

    tracer = _Tracer(field, float(r), domain)
    seed = find_level_point(field, r, domain) if start is None else complex(start)
    origin = tracer.correct(seed)
    if origin is None:
        raise InputError(f"no point of level {r} near {seed}")

    forward, pole = tracer.walk(origin, 1.0, origin)
    if pole is None:
        last = forward[-1]
        landed = tracer.correct(last + (origin - last))
        gap = abs(landed - origin) if landed is not None else abs(last - origin)
        # the return leg must arrive along the starting direction
        turn = np.angle(tracer.gradient(last) / tracer.gradient(origin))
        if abs(turn) > 2 * TURN_MAX:
            gap = max(gap, abs(last - origin))
        points = np.array([origin] + forward)
        through = None
    else:
        backward, _ = tracer.walk(origin, -1.0, None)
        points = np.array(backward[::-1] + [origin] + forward + [pole])
        gap = 0.0
        through = PlanePoint.from_complex(pole)
    simple = not geometry.self_intersects(points)
    logger.info(
        "level %.6g traced: %d points, %d steps, simple=%s%s",
        r,
        points.size,
        tracer.steps,
        simple,
        f", through {pole}" if through is not None else "",
    )
    return LevelCurve(
        level=float(r),
        points=tuple((float(p.real), float(p.imag)) for p in points),
        closure_gap=float(gap),
        simple=simple,
        through_pole=through,
    )


def separation_check(field: HarmonicField, curve: LevelCurve, probes: int = 1000, seed: int = 0) -> int:
    """Count probes on the wrong side of a traced level curve.

    Probes enclosed by the curve (by winding number) must see values above the
    level and the others values below; probes within 1e-3·diameter of the
    curve, the boundary or a pole are skipped.
    """
    domain = field.domain
    scale = geometry.diameter(domain)
    rng = np.random.default_rng(seed)
    polyline = curve.array
    _, outline = geometry.sample_curve(domain.outer, 512)
    margin = 1e-3 * scale
    chosen = []
    while len(chosen) < probes:
        batch = rng.uniform(outline.real.min(), outline.real.max(), 4 * probes) + 1j * rng.uniform(
            outline.imag.min(), outline.imag.max(), 4 * probes
        )
        dist, _, _, _ = geometry.distance_to_boundary(domain, batch)
        ok = geometry.contains(domain, batch) & (dist > margin)
        for pole in field.poles:
            ok &= np.abs(batch - pole) > margin
        near_curve = np.min(np.abs(batch[:, None] - polyline[None, ::4]), axis=1) if polyline.size else np.inf
        ok &= near_curve > 10 * margin
        chosen.extend(batch[ok].tolist())
    points = np.array(chosen[:probes])
    inside = np.round(geometry.polyline_winding(polyline, points)) != 0
    values = np.asarray(field.value(points))
    wrong = np.where(inside, values <= curve.level, values >= curve.level)
    return int(np.count_nonzero(wrong))


def field_diagnostics(
    field: HarmonicField,
    domain: Optional[Domain] = None,
    levels: Sequence[float] = (),
    resolution: int = 128,
    bounds: Optional[Tuple[float, float, float, float]] = None,
) -> FieldDiagnostics:
    """Minimum gradient and sublevel-set component counts on an interior grid.

    Grid cells within 1e-3·diameter of ∂D or 1e-2·diameter of a pole are
    excluded. Components of {field ≤ r} that touch the excluded band along the
    outer curve count as one, since they connect through ∂A₀.
    """
    domain = domain or field.domain
    scale = geometry.diameter(domain)
    if bounds is None:
        grid, mask = _search_grid(domain, resolution, field.poles, 1e-3 * scale, 1e-2 * scale)
    else:
        x0, x1, y0, y1 = bounds
        xs = np.linspace(x0, x1, resolution)
        ys = np.linspace(y0, y1, resolution)
        grid = xs[None, :] + 1j * ys[:, None]
        flat = grid.ravel()
        dist, _, _, _ = geometry.distance_to_boundary(domain, flat)
        mask = geometry.contains(domain, flat) & (dist >= 1e-3 * scale)
        for pole in field.poles:
            mask &= np.abs(flat - pole) >= 1e-2 * scale
        mask = mask.reshape(grid.shape)

    values = np.full(grid.shape, np.nan)
    gradient = np.full(grid.shape, np.nan)
    v, g = field.evaluate(grid[mask])
    values[mask] = v
    gradient[mask] = np.abs(g)
    min_gradient = float(np.nanmin(gradient)) if np.any(mask) else 0.0

    flat = grid.ravel()
    _, component, _, _ = geometry.distance_to_boundary(domain, flat)
    outer_band = (~mask) & (component.reshape(grid.shape) == 0)
    touching = ndimage.binary_dilation(outer_band, structure=np.ones((3, 3)))

    counts = []
    for r in levels:
        sub = mask & (values <= r)
        labels, count = ndimage.label(sub, structure=np.ones((3, 3)))
        outer_labels = np.unique(labels[touching & sub])
        outer_labels = outer_labels[outer_labels > 0]
        merged = count - max(0, outer_labels.size - 1)
        counts.append(int(merged))
    flagged = min_gradient < MIN_GRADIENT
    if flagged:
        logger.warning("field diagnostics: min |∇| = %.3e below %.1e", min_gradient, MIN_GRADIENT)
    return FieldDiagnostics(
        grid_shape=grid.shape,
        min_gradient=min_gradient,
        flagged=flagged,
        levels=tuple(float(r) for r in levels),
        component_counts=tuple(counts),
    )
