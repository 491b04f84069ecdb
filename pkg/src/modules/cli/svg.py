"""SVG figures: domains, level curves and image slit domains.

y is flipped so that the mathematical orientation survives the SVG frame; the
viewBox is fixed by the figure's bounding box so output is byte-stable.
"""

from pathlib import Path
from typing import Sequence, Tuple

import numpy as np
from svgpathtools import polygon, polyline, wsvg

from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain
from src.modules.slitmap.schemas import (
    ChordalSlitDomain,
    CircularSlitDisk,
    CircularSlitRing,
    LevelCurve,
)

PIXELS = 600
MARGIN = 0.05


def _flip(points: np.ndarray) -> list:
    return [complex(round(p.real, 9), round(-p.imag, 9)) for p in points]


def _viewbox(points: np.ndarray) -> Tuple[str, Tuple[int, int]]:
    x0, x1 = float(points.real.min()), float(points.real.max())
    y0, y1 = float(-points.imag.max()), float(-points.imag.min())
    pad = MARGIN * max(x1 - x0, y1 - y0, 1e-9)
    width, height = x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
    box = f"{x0 - pad:.6f} {y0 - pad:.6f} {width:.6f} {height:.6f}"
    scale = PIXELS / max(width, height)
    return box, (int(round(width * scale)), int(round(height * scale)))


def _write(paths: list, colors: str, points: np.ndarray, filename: Path) -> Path:
    box, dimensions = _viewbox(points)
    stroke = 2e-3 * max(float(np.ptp(points.real)), float(np.ptp(points.imag)), 1e-9)
    wsvg(
        paths,
        colors=colors,
        stroke_widths=[stroke] * len(paths),
        filename=str(filename),
        dimensions=dimensions,
        viewbox=box,
    )
    return filename


def domain_paths(domain: Domain, samples: int = 512) -> Tuple[list, list]:
    """Closed svgpathtools paths for every component, plus their point arrays."""
    paths, arrays = [], []
    for curve in domain.components:
        _, z = geometry.sample_curve(curve, samples)
        paths.append(polygon(*_flip(z)))
        arrays.append(z)
    return paths, arrays


def write_domain(domain: Domain, filename: Path, curves: Sequence[LevelCurve] = ()) -> Path:
    """Domain boundary in black and traced level curves in red."""
    paths, arrays = domain_paths(domain)
    colors = "k" * len(paths)
    for curve in curves:
        points = curve.array
        paths.append(polyline(*_flip(points)) if curve.through_pole else polygon(*_flip(points)))
        arrays.append(points)
        colors += "r"
    return _write(paths, colors, np.concatenate(arrays), filename)


def _arc_points(radius: float, start: float, stop: float, samples: int = 128) -> np.ndarray:
    return radius * np.exp(1j * np.linspace(start, stop, samples))


def write_chordal(slits: ChordalSlitDomain, filename: Path) -> Path:
    """Real axis segment and horizontal slits of a chordal image domain."""
    if slits.slits:
        x0 = min(s.x_min for s in slits.slits)
        x1 = max(s.x_max for s in slits.slits)
        top = max(s.height for s in slits.slits)
    else:
        x0, x1, top = -1.0, 1.0, 1.0
    pad = 0.5 * max(x1 - x0, top)
    axis = np.array([x0 - pad, x1 + pad], dtype=complex)
    paths = [polyline(*_flip(axis))]
    arrays = [axis, np.array([x0 - pad + 1j * (top + pad)])]
    for slit in slits.slits:
        segment = np.array([slit.x_min + 1j * slit.height, slit.x_max + 1j * slit.height])
        paths.append(polyline(*_flip(segment)))
        arrays.append(segment)
    return _write(paths, "k" + "b" * len(slits.slits), np.concatenate(arrays), filename)


def write_circular(image, filename: Path) -> Path:
    """Unit circle, inner circle for a ring, and concentric arcs."""
    unit = _arc_points(1.0, 0.0, 2 * np.pi, 512)[:-1]
    paths, arrays, colors = [polygon(*_flip(unit))], [unit], "k"
    if isinstance(image, CircularSlitRing):
        inner = _arc_points(image.inner_radius, 0.0, 2 * np.pi, 512)[:-1]
        paths.append(polygon(*_flip(inner)))
        arrays.append(inner)
        colors += "k"
    for arc in image.arcs:
        points = _arc_points(arc.radius, arc.angle_min, arc.angle_max)
        paths.append(polyline(*_flip(points)))
        arrays.append(points)
        colors += "b"
    if isinstance(image, CircularSlitDisk):
        center = np.array([0.0, 1e-3j, -1e-3j])
        arrays.append(center)
    return _write(paths, colors, np.concatenate(arrays), filename)
