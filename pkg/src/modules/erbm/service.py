"""ERBM Service - ER-Harmonic Linear Algebra (Public Interface).

This is the PUBLIC INTERFACE of the erbm module. Other modules must ONLY
import from this file (and schemas.py / fields.py for types).

An ER-harmonic function is harmonic in D, constant on every hole and has zero
flux around every hole. Every solve here follows one pattern: take a harmonic
field with the right ∂A₀ behavior, measure its fluxes b_j across the collars
η_j, and add Σ c_i ω_i with P·c = −b.
"""

import functools
import logging
from typing import List, Optional, Union

import numpy as np
from scipy.special import erf

from src.core.config import settings
from src.core.errors import IllConditioned, InputError
from src.modules.bm_kernels import service as bm
from src.modules.bm_kernels.fields import HarmonicField
from src.modules.bm_kernels.schemas import BoundaryArc, BoundaryPoint
from src.modules.erbm.fields import ERGreenField, ERHarmonicSolution
from src.modules.erbm.restart import TABLE_SIZE, RestartDensity
from src.modules.erbm.schemas import (
    BoundaryChain,
    ChainFundamentals,
    PeriodMatrix,
    as_matrix,
)
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain, PlanePoint

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e10
SOURCE_FLUX = -2.0

Start = Union[int, complex, PlanePoint]


def _factor(factor: Optional[float]) -> float:
    return settings.COLLAR if factor is None else float(factor)


def collars(domain: Domain, factor: Optional[float] = None) -> List:
    """Collar curves η_1..η_n at ``factor``."""
    factor = _factor(factor)
    return [geometry.collar_curve(domain, i, factor) for i in range(1, domain.n + 1)]


# ============================================================================
# PERIOD MATRIX
# ============================================================================


@functools.lru_cache(maxsize=32)
def _period_matrix(domain: Domain, factor: float) -> PeriodMatrix:
    basis = [bm.h_basis(domain, i) for i in range(1, domain.n + 1)]
    rings = collars(domain, factor)
    p = np.array([[bm.flux(omega, ring.curve) for omega in basis] for ring in rings])
    condition = float(np.linalg.cond(p)) if p.size else 1.0
    logger.info("period matrix %dx%d, condition %.3e", domain.n, domain.n, condition)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise IllConditioned(
            f"period matrix condition {condition:.3e} exceeds {MAX_CONDITION:g}",
            {"condition": condition},
        )
    return PeriodMatrix(matrix=as_matrix(p) if p.size else (), factor=factor, condition=condition)


def period_matrix(domain: Domain, factor: Optional[float] = None) -> PeriodMatrix:
    """P[j][i] = flux(ω_i, η_j).

    Args:
        domain: Valid domain
        factor: Collar factor in (0, 1)

    Returns:
        PeriodMatrix: Symmetric, negative definite, with its condition number

    Raises:
        IllConditioned: Condition number above 10¹⁰
    """
    return _period_matrix(domain, _factor(factor))


def flux_residuals(field: HarmonicField, domain: Domain, factor: Optional[float] = None) -> np.ndarray:
    """Fluxes of ``field`` across every collar η_j."""
    return np.array([bm.flux(field, ring.curve) for ring in collars(domain, factor)])


def _constants(domain: Domain, fluxes: np.ndarray, factor: float) -> np.ndarray:
    if domain.n == 0:
        return np.zeros(0)
    return np.linalg.solve(_period_matrix(domain, factor).array, -np.asarray(fluxes, dtype=float))


def _basis(domain: Domain) -> List[HarmonicField]:
    return [bm.h_basis(domain, i) for i in range(1, domain.n + 1)]


# ============================================================================
# ER-HARMONIC SOLVES
# ============================================================================


def _complete(domain: Domain, harmonic: HarmonicField, factor: float) -> ERHarmonicSolution:
    fluxes = flux_residuals(harmonic, domain, factor)
    constants = _constants(domain, fluxes, factor)
    condition = _period_matrix(domain, factor).condition
    return ERHarmonicSolution(harmonic, _basis(domain), constants, condition)


def solve_er_harmonic(
    domain: Domain, data, factor: Optional[float] = None
) -> ERHarmonicSolution:
    """ER-harmonic function with boundary values ``data`` on ∂A₀.

    Args:
        domain: Valid domain
        data: Scalar, callable of the complex points, or array of outer node values
        factor: Collar factor used for the flux measurements

    Returns:
        ERHarmonicSolution: u₀ + Σ c_i ω_i with zero hole fluxes

    Raises:
        IllConditioned: Period matrix too ill-conditioned
    """
    factor = _factor(factor)
    harmonic = bm.solve_dirichlet(domain, [data] + [0.0] * domain.n)
    return _complete(domain, harmonic, factor)


def _outer_point(w) -> BoundaryPoint:
    if isinstance(w, BoundaryPoint):
        point = w
    else:
        point = BoundaryPoint(component=0, t=float(w))
    if point.component != 0:
        raise InputError("ER Poisson kernel needs w on the outer curve")
    return point


@functools.lru_cache(maxsize=64)
def _er_poisson_kernel(domain: Domain, t: float, factor: float) -> ERHarmonicSolution:
    kernel = bm.poisson_kernel_field(domain, BoundaryPoint(component=0, t=t))
    return _complete(domain, kernel, factor)


def er_poisson_kernel(domain: Domain, w, factor: Optional[float] = None) -> ERHarmonicSolution:
    """H^{ER}(·, w) = H_D(·, w) + Σ ω_i·H^{ER}(A_i, w).

    Args:
        domain: Valid domain
        w: BoundaryPoint on component 0 or an outer-curve parameter
        factor: Collar factor

    Returns:
        ERHarmonicSolution: component_value(i) is H^{ER}(A_i, w)
    """
    point = _outer_point(w)
    return _er_poisson_kernel(domain, point.t, _factor(factor))


@functools.lru_cache(maxsize=64)
def _er_green(domain: Domain, z: complex, factor: float) -> ERGreenField:
    green = bm.greens_function(domain, z)
    fluxes = flux_residuals(green.corrector, domain, factor)
    constants = _constants(domain, fluxes, factor)
    terms = [(1.0, green.corrector)] + list(zip(constants, _basis(domain)))
    condition = _period_matrix(domain, factor).condition if domain.n else 1.0
    return ERGreenField(terms, constants, condition, pole=z)


def er_green(domain: Domain, z, factor: Optional[float] = None) -> ERGreenField:
    """ER Green's function G^{ER}(z, ·).

    The corrector's fluxes fix the constants, so the result does not depend on
    whether a collar happens to enclose z.

    Raises:
        PoleTooCloseToBoundary: z outside D or too close to ∂D
    """
    z = z.as_complex() if isinstance(z, PlanePoint) else complex(z)
    return _er_green(domain, z, _factor(factor))


@functools.lru_cache(maxsize=64)
def _er_green_component(domain: Domain, i: int, factor: float) -> ERGreenField:
    rhs = np.zeros(domain.n)
    rhs[i - 1] = SOURCE_FLUX
    pm = _period_matrix(domain, factor)
    constants = np.linalg.solve(pm.array, rhs)
    return ERGreenField(list(zip(constants, _basis(domain))), constants, pm.condition, hole=i)


def er_green_component(domain: Domain, i: int, factor: Optional[float] = None) -> ERGreenField:
    """G^{ER}(A_i, ·) = Σ c_j ω_j with P·c = −2·e_i.

    Raises:
        InputError: i outside 1..n
    """
    if not 1 <= i <= domain.n:
        raise InputError(f"hole index {i} out of range 1..{domain.n}")
    return _er_green_component(domain, i, _factor(factor))


def outer_exit_density(domain: Domain, i: int, t, factor: Optional[float] = None) -> np.ndarray:
    """H^{ER}(A_i, w) for w = γ₀(t): exit density on ∂A₀ of ERBM started on hole i.

    Computed as half the inward normal derivative of G^{ER}(A_i, ·) on ∂A₀.
    """
    field = er_green_component(domain, i, factor)
    return 0.5 * bm.normal_derivative(field, domain, 0, t)


# ============================================================================
# ER HARMONIC MEASURE
# ============================================================================


def mollified_indicator(arc: BoundaryArc, t: np.ndarray, width: float) -> np.ndarray:
    """Indicator of ``arc`` smoothed by an erf profile of the given width."""
    if arc.whole:
        return np.ones_like(t)
    half = 0.5 * arc.length
    mid = arc.t0 + half
    offset = np.angle(np.exp(1j * (t - mid)))
    return 0.5 * (1.0 + erf((half - np.abs(offset)) / width))


def er_harmonic_measure(
    domain: Domain, start: Start, v: BoundaryArc, factor: Optional[float] = None
) -> float:
    """Probability that ERBM from ``start`` is killed on the arc V ⊂ ∂A₀.

    Args:
        domain: Valid domain
        start: Interior point, or hole index (int) for a start on ∂A_i
        v: Arc on the outer curve
        factor: Collar factor

    Returns:
        float: ER harmonic measure; arc ends are smoothed over two node spacings
    """
    if v.component != 0:
        raise InputError("ER harmonic measure is defined for arcs of the outer curve")
    count = domain.outer.node_count
    t = geometry.parameter_grid(count)
    data = mollified_indicator(v, t, 2.0 * (2.0 * np.pi / count))
    solution = solve_er_harmonic(domain, data, factor)
    if isinstance(start, (int, np.integer)):
        if not 1 <= start <= domain.n:
            raise InputError(f"hole index {start} out of range 1..{domain.n}")
        return solution.component_value(int(start))
    z = start.as_complex() if isinstance(start, PlanePoint) else complex(start)
    return float(solution.value(z))


# ============================================================================
# RESTART DENSITY AND BOUNDARY CHAIN
# ============================================================================


def collar_region(domain: Domain, i: int, factor: Optional[float] = None) -> Domain:
    """Annular region U_i between ∂A_i and its collar η_i."""
    collar = geometry.collar_curve(domain, i, _factor(factor))
    return Domain(outer=collar.curve, holes=(domain.holes[i - 1],))


@functools.lru_cache(maxsize=64)
def _restart_density(domain: Domain, i: int, factor: float) -> RestartDensity:
    region = collar_region(domain, i, factor)
    collar = region.outer
    omega = bm.h_basis(region, 1)
    t = geometry.parameter_grid(collar.node_count)
    _, d1, _ = geometry.evaluate_curve(collar, t)
    flow = bm.normal_derivative(omega, region, 0, t)
    total = float(np.sum(flow * np.abs(d1)) * 2.0 * np.pi / t.size)
    table = bm.normal_derivative(omega, region, 0, geometry.parameter_grid(TABLE_SIZE))
    logger.debug("restart density for hole %d: E_U = %.6f", i, total)
    return RestartDensity(i, collar, t, flow / total, total, table / total)


def restart_density(domain: Domain, i: int, factor: Optional[float] = None) -> RestartDensity:
    """Restart law of ERBM on η_i after hitting hole i.

    Raises:
        ClearanceTooSmall: No valid collar at this factor
    """
    if not 1 <= i <= domain.n:
        raise InputError(f"hole index {i} out of range 1..{domain.n}")
    return _restart_density(domain, i, _factor(factor))


@functools.lru_cache(maxsize=32)
def _boundary_chain(domain: Domain, factor: float) -> BoundaryChain:
    measures = [bm.component_measure(domain, k) for k in range(domain.n + 1)]
    q = np.zeros((domain.n, domain.n + 1))
    for i in range(1, domain.n + 1):
        density = restart_density(domain, i, factor)
        z, d1, _ = geometry.evaluate_curve(density.collar, density.t)
        weights = density.density * np.abs(d1) * 2.0 * np.pi / density.t.size
        weights = weights / weights.sum()
        for k, omega in enumerate(measures):
            q[i - 1, k] = float(np.sum(weights * omega.value(z)))
    deviation = float(np.max(np.abs(q.sum(axis=1) - 1.0)))
    logger.debug("chain rows before normalization deviate from 1 by %.3e", deviation)
    q = q / q.sum(axis=1, keepdims=True)
    p = q.copy()
    for i in range(1, domain.n + 1):
        p[i - 1, i] = 0.0
        p[i - 1] /= 1.0 - q[i - 1, i]
    return BoundaryChain(q=as_matrix(q), p_tilde=as_matrix(p), factor=factor, row_sum_deviation=deviation)


def boundary_chain(domain: Domain, factor: Optional[float] = None) -> BoundaryChain:
    """Component-hit chain: q from collar restarts, p̃ over distinct components.

    Raises:
        InputError: Domain without holes
    """
    if domain.n == 0:
        raise InputError("the boundary chain needs at least one hole")
    return _boundary_chain(domain, _factor(factor))


def chain_fundamentals(chain: BoundaryChain) -> ChainFundamentals:
    """Expected hole visits and absorption probabilities of p̃."""
    block = chain.hole_block
    n = block.shape[0]
    visits = np.linalg.inv(np.eye(n) - block)
    absorption = visits @ chain.p_array[:, 0]
    radius = float(np.max(np.abs(np.linalg.eigvals(block)))) if n else 0.0
    return ChainFundamentals(
        expected_visits=as_matrix(visits), absorption=tuple(float(a) for a in absorption), spectral_radius=radius
    )

