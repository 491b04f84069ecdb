"""Restart law of ERBM on a collar curve.

After hitting hole i, ERBM restarts on η_i from the exit law of the annular
region U_i between ∂A_i and η_i as seen "from A_i": the boundary Poisson
kernel H_∂U(A_i, ·) on η_i, normalized by the excursion measure ℰ_U(A_i, η_i).
"""

import numpy as np

from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import SmoothClosedCurve

TABLE_SIZE = 1024


class RestartDensity:
    """Density per unit arclength on a collar plus an inverse-CDF sampler.

    Args:
        collar: The collar curve η_i
        t: Collar parameters of the tabulated nodes (equispaced)
        density: Density per unit arclength at ``t``, integrating to 1
        total: ℰ_U(A_i, η_i) before normalization
        table_density: Density on a finer equispaced table for sampling
    """

    def __init__(
        self,
        hole_index: int,
        collar: SmoothClosedCurve,
        t: np.ndarray,
        density: np.ndarray,
        total: float,
        table_density: np.ndarray,
    ):
        self.hole_index = hole_index
        self.collar = collar
        self.t = t
        self.density = density
        self.total = float(total)
        grid = geometry.parameter_grid(table_density.size)
        _, d1, _ = geometry.evaluate_curve(collar, grid)
        mass = np.clip(table_density, 0.0, None) * np.abs(d1)
        edges = np.append(grid, 2.0 * np.pi)
        cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (mass + np.roll(mass, -1)) * np.diff(edges))])
        self._table_t = edges
        self._cdf = cumulative / cumulative[-1]

    def mass(self) -> float:
        """Trapezoid integral of the density over the collar."""
        _, d1, _ = geometry.evaluate_curve(self.collar, self.t)
        return float(np.sum(self.density * np.abs(d1)) * 2.0 * np.pi / self.t.size)

    def sample_parameters(self, u: np.ndarray) -> np.ndarray:
        """Collar parameters for uniform variates ``u`` in [0, 1)."""
        return np.interp(u, self._cdf, self._table_t) % (2.0 * np.pi)

    def sample_points(self, u: np.ndarray) -> np.ndarray:
        z, _, _ = geometry.evaluate_curve(self.collar, self.sample_parameters(u))
        return z
