"""CSV grids of fields and maps over the domain's bounding box.

Cells outside D, or too close to ∂D or a singularity to evaluate, hold NaN.
"""

import logging
from pathlib import Path
from typing import Sequence

import numpy as np

from src.core.errors import PathTooCloseToBoundary
from src.modules.bm_kernels.fields import HarmonicField
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain

logger = logging.getLogger(__name__)

BOUNDARY_MARGIN = 1e-3
POLE_MARGIN = 1e-2


def grid_points(domain: Domain, resolution: int, poles: Sequence[complex] = (), margin: float = BOUNDARY_MARGIN):
    """Flattened grid nodes and the mask of those that may be evaluated."""
    _, outline = geometry.sample_curve(domain.outer, 512)
    xs = np.linspace(outline.real.min(), outline.real.max(), resolution)
    ys = np.linspace(outline.imag.min(), outline.imag.max(), resolution)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    scale = geometry.diameter(domain)
    dist, _, _, _ = geometry.distance_to_boundary(domain, z)
    mask = geometry.contains(domain, z) & (dist >= margin * scale)
    for pole in poles:
        mask &= np.abs(z - pole) >= POLE_MARGIN * scale
    return z, mask


def _write(path: Path, header: str, columns: Sequence[np.ndarray]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack(columns), delimiter=",", header=header, comments="", fmt="%.12g")
    return path


def write_field(field: HarmonicField, domain: Domain, path: Path, resolution: int = 64) -> Path:
    """``x,y,value`` rows."""
    z, mask = grid_points(domain, resolution, field.poles)
    values = np.full(z.size, np.nan)
    values[mask] = field.value(z[mask])
    return _write(path, "x,y,value", [z.real, z.imag, values])


def write_map(map_field, path: Path, resolution: int = 32, margin: float = 2e-2) -> Path:
    """``x,y,u,v`` rows with f = u + i·v."""
    domain = map_field.domain
    z, mask = grid_points(domain, resolution, map_field.field.poles, margin)
    if map_field.exclusion is not None:
        point, radius = map_field.exclusion
        mask &= np.abs(z - point) >= 2 * radius
    images = np.full(z.size, np.nan + 1j * np.nan)
    live = np.flatnonzero(mask)
    try:
        images[live] = map_field(z[live])
    except PathTooCloseToBoundary:
        for k in live:
            try:
                images[k] = map_field(z[k])
            except PathTooCloseToBoundary:
                logger.debug("map grid: no path to %s", z[k])
    return _write(path, "x,y,u,v", [z.real, z.imag, images.real, images.imag])
