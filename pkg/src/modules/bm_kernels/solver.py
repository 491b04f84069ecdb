"""Nyström boundary integral solver for the interior Dirichlet problem.

Representation on a domain with outer curve Γ₀ and holes Γ₁..Γₙ:

    u(x) = Re F(x) + Σ_k A_k log|x − z_k|
    F(x) = (1/2πi) ∮_{∂D} μ(ζ) dζ / (ζ − x)

∂D is positively oriented (outer counterclockwise, holes clockwise) and z_k is
a point inside hole k. The real density μ solves a second-kind equation
discretized with the trapezoid rule; one zero-mean constraint per hole pairs
with the unknown A_k and removes the n-dimensional null space of the double
layer on multiply connected domains.

Near the boundary the trapezoid sums lose accuracy, so points closer than a
few node spacings are evaluated on an FFT-upsampled copy of the nearest
component with the first-order Taylor part of μ subtracted.
"""

import logging
from typing import Dict, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from src.core.errors import SolverSingular
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
SINGULAR_CONDITION = 1e12
NEAR_SPACINGS = 6.0
MAX_UPSAMPLE = 64
_BLOCK = 2_000_000

# ============================================================================
# SPECTRAL HELPERS
# ============================================================================


def _wavenumbers(count: int) -> np.ndarray:
    k = np.fft.fftfreq(count, 1.0 / count)
    if count % 2 == 0:
        k[count // 2] = 0.0
    return k


def spectral_derivative(values: np.ndarray) -> np.ndarray:
    """d/dt of the trigonometric interpolant of equispaced periodic samples."""
    spectrum = np.fft.fft(values)
    return np.fft.ifft(1j * _wavenumbers(values.size) * spectrum)


def trig_interpolate(values: np.ndarray, t: np.ndarray, derivative: bool = False) -> np.ndarray:
    """Evaluate the trigonometric interpolant (or its t-derivative) at ``t``."""
    count = values.size
    k = _wavenumbers(count)
    spectrum = np.fft.fft(values) / count
    if count % 2 == 0:
        spectrum[count // 2] = 0.0
    if derivative:
        spectrum = 1j * k * spectrum
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.size, dtype=complex)
    step = max(1, _BLOCK // count)
    for start in range(0, t.size, step):
        out[start : start + step] = np.exp(1j * np.outer(t[start : start + step], k)) @ spectrum
    return out


def upsample(values: np.ndarray, factor: int) -> np.ndarray:
    """Zero-padded FFT resampling onto ``factor`` times as many equispaced nodes."""
    if factor == 1:
        return np.asarray(values, dtype=complex)
    count = values.size
    spectrum = np.fft.fft(values)
    padded = np.zeros(count * factor, dtype=complex)
    positive = spectrum[: (count + 1) // 2]
    negative = spectrum[count // 2 + 1 :]
    padded[: positive.size] = positive
    if negative.size:
        padded[-negative.size :] = negative
    return np.fft.ifft(padded) * factor


# ============================================================================
# DISCRETIZATION
# ============================================================================


class BoundaryNodes:
    """Trapezoid nodes of every component of ∂D, concatenated component by component."""

    def __init__(self, domain: Domain):
        self.domain = domain
        self.curves = domain.components
        counts = [curve.node_count for curve in self.curves]
        self.offsets = np.concatenate([[0], np.cumsum(counts)]).astype(int)
        t, z, dz, ddz, sigma, h = [], [], [], [], [], []
        for index, curve in enumerate(self.curves):
            grid = geometry.parameter_grid(curve.node_count)
            zk, d1, d2 = geometry.evaluate_curve(curve, grid)
            t.append(grid)
            z.append(zk)
            dz.append(d1)
            ddz.append(d2)
            sigma.append(np.full(grid.size, 1.0 if index == 0 else -1.0))
            h.append(np.full(grid.size, TWO_PI / grid.size))
        self.t = np.concatenate(t)
        self.z = np.concatenate(z)
        self.dz = np.concatenate(dz)
        self.ddz = np.concatenate(ddz)
        self.sigma = np.concatenate(sigma)
        self.h = np.concatenate(h)
        # F(x) = Σ_j weight_j μ_j / (z_j − x)
        self.weight = self.h * self.sigma * self.dz / (2j * np.pi)
        self.anchors = np.array(
            [geometry.interior_point(hole) for hole in domain.holes], dtype=complex
        )
        self._fine: Dict[Tuple[int, int], Tuple[np.ndarray, np.ndarray]] = {}

    @property
    def size(self) -> int:
        return int(self.z.size)

    @property
    def hole_count(self) -> int:
        return int(self.anchors.size)

    def span(self, component: int) -> slice:
        return slice(self.offsets[component], self.offsets[component + 1])

    def count(self, component: int) -> int:
        return int(self.offsets[component + 1] - self.offsets[component])

    def fine(self, component: int, factor: int) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and Cauchy weights of ``component`` refined ``factor`` times."""
        key = (component, factor)
        if key not in self._fine:
            count = self.count(component) * factor
            grid = geometry.parameter_grid(count)
            zf, d1, _ = geometry.evaluate_curve(self.curves[component], grid)
            sign = 1.0 if component == 0 else -1.0
            self._fine[key] = (zf, (TWO_PI / count) * sign * d1 / (2j * np.pi))
        return self._fine[key]


class DirichletOperator:
    """LU-factored Nyström system, reused for every right-hand side on one domain."""

    def __init__(self, nodes: BoundaryNodes):
        self.nodes = nodes
        size, holes = nodes.size, nodes.hole_count
        diff = nodes.z[None, :] - nodes.z[:, None]
        np.fill_diagonal(diff, 1.0)
        scale = nodes.h * nodes.sigma / TWO_PI
        kernel = scale[None, :] * np.imag(nodes.dz[None, :] / diff)
        kernel[np.diag_indices(size)] = scale * np.imag(nodes.ddz / nodes.dz) / 2.0

        matrix = np.zeros((size + holes, size + holes))
        matrix[:size, :size] = kernel + 0.5 * np.eye(size)
        for k in range(holes):
            matrix[:size, size + k] = np.log(np.abs(nodes.z - nodes.anchors[k]))
            span = nodes.span(k + 1)
            ds = nodes.h[span] * np.abs(nodes.dz[span])
            matrix[size + k, span] = ds / ds.sum()

        self.condition = float(np.linalg.cond(matrix))
        logger.info(
            "Nyström system assembled: %d unknowns, condition %.3e", size + holes, self.condition
        )
        if not np.isfinite(self.condition) or self.condition > SINGULAR_CONDITION:
            raise SolverSingular(
                f"boundary integral system is rank deficient (condition {self.condition:.3e})",
                {"condition": self.condition, "unknowns": size + holes},
            )
        self._lu = lu_factor(matrix)

    def solve(self, rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Solve for one (shape M) or many (shape M×r) right-hand sides.

        Returns:
            tuple: (density μ, log-source strengths A)
        """
        rhs = np.asarray(rhs, dtype=float)
        size = self.nodes.size
        full = np.zeros((size + self.nodes.hole_count,) + rhs.shape[1:])
        full[:size] = rhs
        solution = lu_solve(self._lu, full)
        logger.debug("solved %s right-hand side(s)", 1 if rhs.ndim == 1 else rhs.shape[1])
        return solution[:size], solution[size:]


# ============================================================================
# EVALUATION
# ============================================================================


def _moment_sums(zeta, weight, density, points):
    """Cauchy sums of density, 1 and ζ against 1/(ζ − x) and 1/(ζ − x)²."""
    rows = max(1, _BLOCK // zeta.size)
    out = np.zeros((6, points.size), dtype=complex)
    columns = np.stack([weight * density, weight, weight * zeta], axis=1)
    for start in range(0, points.size, rows):
        block = slice(start, start + rows)
        inverse = 1.0 / (zeta[None, :] - points[block, None])
        out[:3, block] = (inverse @ columns).T
        out[3:, block] = ((inverse * inverse) @ columns).T
    return out


class LayerPotential:
    """Value and gradient of one solved density, in the interior and on ∂D.

    Gradients are complex numbers u_x + i·u_y.
    """

    def __init__(self, nodes: BoundaryNodes, mu: np.ndarray, strengths: np.ndarray):
        self.nodes = nodes
        self.mu = np.asarray(mu, dtype=float)
        self.strengths = np.asarray(strengths, dtype=float)
        self._limits: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self._fine_mu: Dict[Tuple[int, int], np.ndarray] = {}

    def _sources(self, points):
        value = np.zeros(points.size)
        slope = np.zeros(points.size, dtype=complex)
        for anchor, strength in zip(self.nodes.anchors, self.strengths):
            rel = points - anchor
            value += strength * np.log(np.abs(rel))
            slope += strength / rel
        return value, slope

    def _density_on(self, component: int, factor: int) -> np.ndarray:
        key = (component, factor)
        if key not in self._fine_mu:
            self._fine_mu[key] = upsample(self.mu[self.nodes.span(component)], factor).real
        return self._fine_mu[key]

    def _near(self, points, component, factor, t_star, projection):
        nodes = self.nodes
        span = nodes.span(component)
        mu_k = self.mu[span]
        curve = nodes.curves[component]
        a = trig_interpolate(mu_k, t_star).real
        _, d1, _ = geometry.evaluate_curve(curve, t_star)
        b = trig_interpolate(mu_k, t_star, derivative=True).real / d1

        keep = np.ones(nodes.size, dtype=bool)
        keep[span] = False
        zf, wf = nodes.fine(component, factor)
        zeta = np.concatenate([nodes.z[keep], zf])
        weight = np.concatenate([nodes.weight[keep], wf])
        density = np.concatenate([self.mu[keep], self._density_on(component, factor)])
        s_mu, s_one, s_zeta, t_mu, t_one, t_zeta = _moment_sums(zeta, weight, density, points)

        f = a + b * (points - projection) + s_mu - a * s_one - b * (s_zeta - projection * s_one)
        df = b + t_mu - a * t_one - b * (t_zeta - projection * t_one)
        return f, df

    def evaluate(self, points) -> Tuple[np.ndarray, np.ndarray]:
        """Interior value and gradient at an array of points."""
        points = np.asarray(points, dtype=complex)
        shape = points.shape
        points = np.atleast_1d(points).ravel()
        nodes = self.nodes
        dist, component, t_star, projection = geometry.distance_to_boundary(nodes.domain, points)

        spacing = np.empty(points.size)
        for k, curve in enumerate(nodes.curves):
            mask = component == k
            if np.any(mask):
                _, d1, _ = geometry.evaluate_curve(curve, t_star[mask])
                spacing[mask] = TWO_PI / curve.node_count * np.abs(d1)
        ratio = NEAR_SPACINGS * spacing / np.maximum(dist, 1e-300)
        factor = np.where(
            ratio <= 1.0,
            1,
            np.minimum(2 ** np.ceil(np.log2(np.maximum(ratio, 1.0))), MAX_UPSAMPLE),
        ).astype(int)
        on_curve = dist <= 1e-13 * np.maximum(spacing, 1e-300)

        f = np.zeros(points.size, dtype=complex)
        df = np.zeros(points.size, dtype=complex)
        far = (factor == 1) & ~on_curve
        if np.any(far):
            sums = _moment_sums(nodes.z, nodes.weight, self.mu, points[far])
            f[far], df[far] = sums[0], sums[3]
        for k in range(len(nodes.curves)):
            for m in np.unique(factor[(component == k) & (factor > 1) & ~on_curve]):
                group = (component == k) & (factor == m) & ~on_curve
                f[group], df[group] = self._near(
                    points[group], k, int(m), t_star[group], projection[group]
                )

        value_src, slope_src = self._sources(points)
        value = f.real + value_src
        gradient = np.conj(df + slope_src)
        for k in range(len(nodes.curves)):
            mask = on_curve & (component == k)
            if np.any(mask):
                value[mask], gradient[mask] = self.boundary(k, t_star[mask])
        return value.reshape(shape), gradient.reshape(shape)

    def _boundary_limit(self, component: int) -> Tuple[np.ndarray, np.ndarray]:
        """Interior limit F₊ and dF₊/dt at the nodes of one component."""
        if component not in self._limits:
            nodes = self.nodes
            span = nodes.span(component)
            y = nodes.z[span]
            mu_k = self.mu[span]
            diff = nodes.z[None, :] - y[:, None]
            own = np.arange(y.size)
            diff[own, span.start + own] = 1.0
            terms = nodes.weight[None, :] * (self.mu[None, :] - mu_k[:, None]) / diff
            terms[own, span.start + own] = 0.0
            sign = 1.0 if component == 0 else -1.0
            h = TWO_PI / y.size
            mu_t = spectral_derivative(mu_k).real
            f_plus = mu_k + terms.sum(axis=1) + h * sign * mu_t / (2j * np.pi)
            self._limits[component] = (f_plus, spectral_derivative(f_plus))
        return self._limits[component]

    def boundary(self, component: int, t) -> Tuple[np.ndarray, np.ndarray]:
        """Boundary value and gradient (interior limits) at parameters ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        f_plus, df_plus = self._boundary_limit(component)
        curve = self.nodes.curves[component]
        z, d1, _ = geometry.evaluate_curve(curve, t)
        f = trig_interpolate(f_plus, t)
        slope = trig_interpolate(df_plus, t) / d1
        value_src, slope_src = self._sources(z)
        return f.real + value_src, np.conj(slope + slope_src)
