"""Curve numerics: evaluation, sampling, intersection and nearest-point search.

Internal to the geometry package. Points are complex numbers throughout;
parameters live in [0, 2π).
"""

import logging
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

from src.modules.geometry.models import CurveKind
from src.modules.geometry.schemas import SmoothClosedCurve

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
_CHUNK = 8192


def fourier_modes(curve: SmoothClosedCurve) -> Tuple[np.ndarray, np.ndarray]:
    """Mode numbers k = -K..K and complex coefficients c_k of a Fourier curve."""
    coeffs = np.array([complex(re, im) for re, im in curve.coefficients], dtype=complex)
    K = (len(coeffs) - 1) // 2
    return np.arange(-K, K + 1), coeffs


def evaluate(curve: SmoothClosedCurve, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return γ(t), γ′(t), γ″(t) as complex arrays shaped like ``t``."""
    t = np.asarray(t, dtype=float)
    shape = t.shape
    t = t.ravel()
    c = curve.center.as_complex()

    if curve.kind is CurveKind.CIRCLE:
        e = np.exp(1j * t)
        r = curve.radius
        z, d1, d2 = c + r * e, 1j * r * e, -r * e
    elif curve.kind is CurveKind.ELLIPSE:
        a, b = curve.semi_axes
        rot = np.exp(1j * curve.rotation)
        cos_t, sin_t = np.cos(t), np.sin(t)
        z = c + rot * (a * cos_t + 1j * b * sin_t)
        d1 = rot * (-a * sin_t + 1j * b * cos_t)
        d2 = rot * (-a * cos_t - 1j * b * sin_t)
    else:
        ks, coeffs = fourier_modes(curve)
        z = np.empty(t.size, dtype=complex)
        d1 = np.empty(t.size, dtype=complex)
        d2 = np.empty(t.size, dtype=complex)
        for start in range(0, t.size, _CHUNK):
            block = np.exp(1j * np.outer(t[start : start + _CHUNK], ks))
            z[start : start + _CHUNK] = c + block @ coeffs
            d1[start : start + _CHUNK] = block @ (1j * ks * coeffs)
            d2[start : start + _CHUNK] = block @ (-(ks**2) * coeffs)

    return z.reshape(shape), d1.reshape(shape), d2.reshape(shape)


def parameter_grid(count: int) -> np.ndarray:
    return TWO_PI * np.arange(count) / count


def sample(curve: SmoothClosedCurve, count: int) -> Tuple[np.ndarray, np.ndarray]:
    t = parameter_grid(count)
    z, _, _ = evaluate(curve, t)
    return t, z


def signed_area(curve: SmoothClosedCurve, count: int = 512) -> float:
    t = parameter_grid(count)
    z, d1, _ = evaluate(curve, t)
    return float(0.5 * np.sum(np.imag(np.conj(z) * d1)) * TWO_PI / count)


def point_set_diameter(points: np.ndarray) -> float:
    diffs = np.abs(points[:, None] - points[None, :])
    return float(diffs.max())


def curve_diameter(curve: SmoothClosedCurve) -> float:
    _, z = sample(curve, 256)
    return point_set_diameter(z)


def winding_number(polyline: np.ndarray, points) -> np.ndarray:
    """Argument-principle winding of a closed polyline around each point.

    The sum of angle increments of a closed polygon is an exact multiple of 2π,
    so the result is an integer up to rounding for points off the polyline.
    """
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    closed = np.append(polyline, polyline[0])
    result = np.empty(points.size)
    for start in range(0, points.size, 256):
        p = points[start : start + 256, None]
        rel = closed[None, :] - p
        increments = np.angle(rel[:, 1:] / rel[:, :-1])
        result[start : start + 256] = increments.sum(axis=1) / TWO_PI
    return result


def _orientation(a, b, c) -> np.ndarray:
    return np.sign(np.imag(np.conj(b - a) * (c - a)))


def _segments_cross(p1, p2, q1, q2) -> np.ndarray:
    o1 = _orientation(p1, p2, q1)
    o2 = _orientation(p1, p2, q2)
    o3 = _orientation(q1, q2, p1)
    o4 = _orientation(q1, q2, p2)
    return (o1 * o2 < 0) & (o3 * o4 < 0)


def self_intersects(polyline: np.ndarray) -> bool:
    """Dense segment-pair test on a closed polyline (non-adjacent pairs only)."""
    m = polyline.size
    a = polyline
    b = np.roll(polyline, -1)
    idx = np.arange(m)
    for start in range(0, m, 256):
        rows = idx[start : start + 256]
        cross = _segments_cross(a[rows, None], b[rows, None], a[None, :], b[None, :])
        gap = np.abs(rows[:, None] - idx[None, :])
        gap = np.minimum(gap, m - gap)
        if np.any(cross & (gap >= 2)):
            return True
    return False


def polylines_intersect(first: np.ndarray, second: np.ndarray) -> bool:
    a, b = first, np.roll(first, -1)
    c, d = second, np.roll(second, -1)
    for start in range(0, a.size, 256):
        rows = slice(start, start + 256)
        if np.any(_segments_cross(a[rows, None], b[rows, None], c[None, :], d[None, :])):
            return True
    return False


def min_point_distance(first: np.ndarray, second: np.ndarray) -> float:
    tree = cKDTree(np.column_stack([second.real, second.imag]))
    dist, _ = tree.query(np.column_stack([first.real, first.imag]))
    return float(np.min(dist))


def project(curve: SmoothClosedCurve, points: np.ndarray, t0: np.ndarray, step: float):
    """Newton refinement of the nearest-point parameter from a seed ``t0``.

    Minimizes |γ(t) − p|²/2; each update is clipped to ``step`` so that the
    iteration stays in the basin of the seed.
    """
    t = np.array(t0, dtype=float)
    for _ in range(6):
        z, d1, d2 = evaluate(curve, t)
        rel = z - points
        g = np.real(np.conj(rel) * d1)
        gp = np.abs(d1) ** 2 + np.real(np.conj(rel) * d2)
        update = np.where(gp > 0, g / np.where(gp > 0, gp, 1.0), 0.0)
        t = t - np.clip(update, -step, step)
    t = np.mod(t, TWO_PI)
    z, _, _ = evaluate(curve, t)
    return t, z


def fourier_fit(values: np.ndarray, modes: int) -> Tuple[complex, np.ndarray]:
    """Project equispaced samples onto modes -K..K; returns (c_0, c_{-K..K} with c_0 = 0)."""
    m = values.size
    spectrum = np.fft.fft(values) / m
    ks = np.arange(-modes, modes + 1)
    coeffs = spectrum[np.mod(ks, m)]
    c0 = complex(coeffs[modes])
    coeffs[modes] = 0.0
    return c0, coeffs


class BoundaryLocator:
    """Nearest boundary point for batches of query points.

    A KD-tree over dense samples of every component seeds the parameter; a few
    clipped Newton steps refine it on the winning component.
    """

    def __init__(self, curves: Tuple[SmoothClosedCurve, ...], density: int = 4096):
        self.curves = curves
        self.density = density
        ts, zs, labels = [], [], []
        for index, curve in enumerate(curves):
            t, z = sample(curve, density)
            ts.append(t)
            zs.append(z)
            labels.append(np.full(density, index))
        self._t = np.concatenate(ts)
        self._z = np.concatenate(zs)
        self._labels = np.concatenate(labels)
        self._tree = cKDTree(np.column_stack([self._z.real, self._z.imag]))
        logger.debug("BoundaryLocator built over %d samples", self._z.size)

    def query(self, points):
        """Return (distance, component, parameter, projection) arrays."""
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        coarse, idx = self._tree.query(np.column_stack([points.real, points.imag]))
        component = self._labels[idx]
        t = self._t[idx].copy()
        projection = self._z[idx].copy()
        distance = np.asarray(coarse, dtype=float).copy()
        step = 2.0 * TWO_PI / self.density
        for index, curve in enumerate(self.curves):
            mask = component == index
            if not np.any(mask):
                continue
            t_new, z_new = project(curve, points[mask], t[mask], step)
            d_new = np.abs(z_new - points[mask])
            better = d_new <= distance[mask]
            sel = np.flatnonzero(mask)[better]
            t[sel] = t_new[better]
            projection[sel] = z_new[better]
            distance[sel] = d_new[better]
        return distance, component, t, projection

    def inside(self, points) -> np.ndarray:
        """True where a point lies in the open domain (normal-side test at the projection)."""
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        distance, component, t, projection = self.query(points)
        result = np.zeros(points.size, dtype=bool)
        for index, curve in enumerate(self.curves):
            mask = component == index
            if not np.any(mask):
                continue
            _, d1, _ = evaluate(curve, t[mask])
            normal = 1j * d1 / np.abs(d1)
            if index > 0:
                normal = -normal
            side = np.real(np.conj(normal) * (points[mask] - projection[mask]))
            result[mask] = side > 0
        return result & (distance > 0)
