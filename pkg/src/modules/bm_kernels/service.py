"""BM Kernels Service - Potential Theory of Killed Brownian Motion (Public Interface).

This is the PUBLIC INTERFACE of the bm_kernels module. Other modules must ONLY
import from this file (and schemas.py / fields.py for types).

Conventions:
- G(z, w) ≥ 0 with singular part −(1/π)·log|w − z| (occupation density).
- H_D(z, w) = (1/2)·∂G(z, ·)/∂n_w with n_w the inward normal at w.
- H_∂D(w, z) = ∂H_D(·, w)/∂n_z, again with the inward normal.
- flux(u, η) = ∮ ∂u/∂n ds with n pointing away from the region η encloses.
"""

import functools
import logging
from typing import Callable, Iterable, Sequence, Tuple, Union

import numpy as np

from src.core.errors import (
    ArcsNotDisjoint,
    CurveTouchesBoundary,
    InputError,
    PointsTooClose,
    PoleTooCloseToBoundary,
)
from src.modules.bm_kernels import quadrature
from src.modules.bm_kernels.fields import (
    AnalyticField,
    BoundaryDipole,
    GreenField,
    HarmonicField,
    HarmonicSolution,
    LogSource,
    PoissonKernelField,
)
from src.modules.bm_kernels.schemas import BoundaryArc, BoundaryPoint
from src.modules.bm_kernels.solver import BoundaryNodes, DirichletOperator, LayerPotential
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain, PlanePoint, SmoothClosedCurve

logger = logging.getLogger(__name__)

POLE_CLEARANCE = 1e-4
BOUNDARY_SEPARATION = 1e-3

BoundaryData = Union[float, Callable[[np.ndarray], np.ndarray], Sequence]
ArcLike = Union[int, BoundaryArc]


def _as_complex(z) -> complex:
    if isinstance(z, PlanePoint):
        return z.as_complex()
    return complex(z)


def _as_arc(v: ArcLike) -> BoundaryArc:
    if isinstance(v, BoundaryArc):
        return v
    return BoundaryArc.component_arc(int(v))


# ============================================================================
# DIRICHLET SOLVER
# ============================================================================


@functools.lru_cache(maxsize=16)
def _operator(domain: Domain) -> DirichletOperator:
    geometry.require_valid(domain)
    return DirichletOperator(BoundaryNodes(domain))


def condition_number(domain: Domain) -> float:
    """Condition estimate of the domain's boundary integral system."""
    return _operator(domain).condition


def _boundary_values(nodes: BoundaryNodes, data: BoundaryData) -> np.ndarray:
    if callable(data):
        return np.real(np.asarray(data(nodes.z), dtype=complex))
    if np.isscalar(data):
        return np.full(nodes.size, float(data))
    data = list(data)
    if len(data) != len(nodes.curves):
        raise InputError(f"expected data for {len(nodes.curves)} components, got {len(data)}")
    values = np.empty(nodes.size)
    for k, entry in enumerate(data):
        span = nodes.span(k)
        if callable(entry):
            values[span] = np.real(np.asarray(entry(nodes.z[span]), dtype=complex))
        elif np.isscalar(entry):
            values[span] = float(entry)
        else:
            entry = np.asarray(entry, dtype=float)
            if entry.shape != (nodes.count(k),):
                raise InputError(
                    f"component {k} data has shape {entry.shape}, expected ({nodes.count(k)},)"
                )
            values[span] = entry
    if not np.all(np.isfinite(values)):
        raise InputError("boundary data must be finite")
    return values


def solve_dirichlet(domain: Domain, data: BoundaryData) -> HarmonicSolution:
    """Solve Δu = 0 in D with u = data on ∂D.

    Args:
        domain: Valid domain
        data: A scalar, a callable of the complex boundary points, or one entry
            per component (0 = outer), each a scalar, a callable or an array of
            node values

    Returns:
        HarmonicSolution: Evaluators for u and ∇u

    Raises:
        SolverSingular: Numerically rank-deficient system
        InvalidDomain: Domain violates its invariants
    """
    operator = _operator(domain)
    values = _boundary_values(operator.nodes, data)
    mu, strengths = operator.solve(values)
    return HarmonicSolution(
        domain, LayerPotential(operator.nodes, mu, strengths), values, operator.condition
    )


def solve_dirichlet_many(domain: Domain, columns: np.ndarray) -> list:
    """Solve for several node-value right-hand sides (shape M×r) with one factorization."""
    operator = _operator(domain)
    mu, strengths = operator.solve(columns)
    return [
        HarmonicSolution(
            domain,
            LayerPotential(operator.nodes, mu[:, j], strengths[:, j]),
            columns[:, j],
            operator.condition,
        )
        for j in range(columns.shape[1])
    ]


# ============================================================================
# HARMONIC MEASURE BASIS
# ============================================================================


@functools.lru_cache(maxsize=64)
def _component_measure(domain: Domain, k: int) -> HarmonicSolution:
    data = [1.0 if j == k else 0.0 for j in range(domain.n + 1)]
    return solve_dirichlet(domain, data)


def h_basis(domain: Domain, i: int) -> HarmonicSolution:
    """ω_i: harmonic, 1 on ∂A_i, 0 on every other component.

    Raises:
        InputError: i outside 1..n
    """
    if not 1 <= i <= domain.n:
        raise InputError(f"hole index {i} out of range 1..{domain.n}")
    return _component_measure(domain, i)


def outer_measure(domain: Domain) -> HarmonicSolution:
    """ω₀: harmonic measure of the outer curve."""
    return _component_measure(domain, 0)


def component_measure(domain: Domain, k: int) -> HarmonicSolution:
    """ω_k for any component index (0 = outer)."""
    if not 0 <= k <= domain.n:
        raise InputError(f"component index {k} out of range 0..{domain.n}")
    return _component_measure(domain, k)


# ============================================================================
# GREEN'S FUNCTION AND POISSON KERNELS
# ============================================================================


def _check_pole(domain: Domain, z: complex) -> None:
    scale = geometry.diameter(domain)
    dist, _, _, _ = geometry.distance_to_boundary(domain, [z])
    inside = bool(geometry.contains(domain, [z])[0])
    if not inside or dist[0] <= POLE_CLEARANCE * scale:
        raise PoleTooCloseToBoundary(
            f"pole {z} is {'outside D' if not inside else f'{dist[0]:.3e} from the boundary'}",
            {"distance": float(dist[0]), "limit": POLE_CLEARANCE * scale},
        )


@functools.lru_cache(maxsize=128)
def _green(domain: Domain, z: complex) -> GreenField:
    _check_pole(domain, z)
    corrector = solve_dirichlet(domain, lambda y: np.log(np.abs(y - z)) / np.pi)
    return GreenField(z, corrector)


def greens_function(domain: Domain, z) -> GreenField:
    """Green's function G(z, ·) of D with pole z.

    Raises:
        PoleTooCloseToBoundary: z outside D or within 10⁻⁴·diameter of ∂D
    """
    return _green(domain, _as_complex(z))


def normal_derivative(field: HarmonicField, domain: Domain, component: int, t) -> np.ndarray:
    """Inward normal derivative of ``field`` along a boundary component (interior limit)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _, gradient = field.boundary(component, t)
    _, d1, _ = geometry.evaluate_curve(domain.component(component), t)
    normal = 1j * d1 / np.abs(d1)
    if component > 0:
        normal = -normal
    return np.real(np.conj(gradient) * normal)


def poisson_kernel_density(domain: Domain, z, component: int, t) -> np.ndarray:
    """H_D(z, γ_k(t)) for an array of parameters on one component."""
    green = greens_function(domain, z)
    return 0.5 * normal_derivative(green, domain, component, t)


def poisson_kernel(domain: Domain, z, w: BoundaryPoint) -> float:
    """Poisson kernel H_D(z, w) per unit arclength.

    Args:
        domain: Valid domain
        z: Interior point
        w: Boundary point

    Returns:
        float: Density of harmonic measure from z at w
    """
    return float(poisson_kernel_density(domain, z, w.component, w.t)[0])


@functools.lru_cache(maxsize=256)
def _kernel_field(domain: Domain, component: int, t: float) -> PoissonKernelField:
    dipole = BoundaryDipole(domain, component, t)
    nodes = _operator(domain).nodes
    data = [dipole.boundary(k, nodes.t[nodes.span(k)])[0] for k in range(domain.n + 1)]
    return PoissonKernelField(dipole, solve_dirichlet(domain, data))


def poisson_kernel_field(domain: Domain, w: BoundaryPoint) -> PoissonKernelField:
    """H_D(·, w) as a harmonic field of its first argument."""
    return _kernel_field(domain, w.component, w.t)


def _check_separation(domain: Domain, w: BoundaryPoint, z: BoundaryPoint) -> None:
    if w.component != z.component:
        return
    curve = domain.component(w.component)

    def speed(t):
        return np.abs(geometry.evaluate_curve(curve, t)[1])

    lo, hi = sorted((w.t, z.t))
    separation = min(
        quadrature.arc_length(speed, lo, hi),
        quadrature.arc_length(speed, hi, lo + 2.0 * np.pi),
    )
    if separation <= BOUNDARY_SEPARATION:
        raise PointsTooClose(
            f"boundary points are {separation:.3e} apart along the curve",
            {"separation": separation, "limit": BOUNDARY_SEPARATION},
        )


def boundary_poisson_kernel(domain: Domain, w: BoundaryPoint, z: BoundaryPoint) -> float:
    """Boundary Poisson kernel H_∂D(w, z) = ∂H_D(·, w)/∂n_z.

    Raises:
        PointsTooClose: w and z on the same component within arclength 10⁻³
    """
    _check_separation(domain, w, z)
    field = poisson_kernel_field(domain, w)
    return float(normal_derivative(field, domain, z.component, z.t)[0])


def harmonic_measure(domain: Domain, z, v: ArcLike) -> float:
    """Probability that Brownian motion from z exits D through V.

    Args:
        domain: Valid domain
        z: Interior point
        v: Component index or BoundaryArc

    Returns:
        float: Harmonic measure in [0, 1]
    """
    z = _as_complex(z)
    arc = _as_arc(v)
    if arc.whole:
        return float(component_measure(domain, arc.component).value(z))
    dist, _, _, _ = geometry.distance_to_boundary(domain, [z])
    curve = domain.component(arc.component)
    length = quadrature.arc_length(
        lambda t: np.abs(geometry.evaluate_curve(curve, t)[1]), arc.t0, arc.t0 + arc.length
    )
    panels = int(np.clip(np.ceil(length / max(float(dist[0]), 1e-12)), 8, 512))
    t, weights = quadrature.arc_rule(arc, panels)
    _, d1, _ = geometry.evaluate_curve(curve, t)
    density = poisson_kernel_density(domain, z, arc.component, t)
    return float(np.sum(density * np.abs(d1) * weights))


def excursion_measure(domain: Domain, v: ArcLike, v_prime: ArcLike, panels: int = 8) -> float:
    """Excursion measure ℰ_D(V, V′) = ∬ H_∂D(w, z) |dw| |dz|.

    Whole components use the normal derivative of the harmonic measure of one
    of them; two proper arcs use a Gauss–Legendre double integral with one
    Poisson-kernel solve per node of V.

    Raises:
        ArcsNotDisjoint: V and V′ share a point
    """
    first, second = _as_arc(v), _as_arc(v_prime)
    if quadrature.arcs_overlap(first, second):
        raise ArcsNotDisjoint(
            f"arcs on component {first.component} overlap",
            {"first": first.model_dump(), "second": second.model_dump()},
        )
    if second.whole and not first.whole:
        first, second = second, first

    target = domain.component(second.component)
    if first.whole:
        omega = component_measure(domain, first.component)
        if second.whole:
            t = geometry.parameter_grid(target.node_count)
            weights = np.full(t.size, 2.0 * np.pi / t.size)
        else:
            t, weights = quadrature.arc_rule(second, panels)
        _, d1, _ = geometry.evaluate_curve(target, t)
        flow = normal_derivative(omega, domain, second.component, t)
        return float(np.sum(flow * np.abs(d1) * weights))

    source = domain.component(first.component)
    tw, ww = quadrature.arc_rule(first, panels)
    _, dw, _ = geometry.evaluate_curve(source, tw)
    tz, wz = quadrature.arc_rule(second, panels)
    _, dz, _ = geometry.evaluate_curve(target, tz)
    nodes = _operator(domain).nodes
    dipoles = [BoundaryDipole(domain, first.component, t) for t in tw]
    columns = np.column_stack(
        [
            np.concatenate(
                [d.boundary(k, nodes.t[nodes.span(k)])[0] for k in range(domain.n + 1)]
            )
            for d in dipoles
        ]
    )
    regular = solve_dirichlet_many(domain, columns)
    total = 0.0
    for dipole, solution, weight, d1 in zip(dipoles, regular, ww, dw):
        field = PoissonKernelField(dipole, solution)
        kernel = normal_derivative(field, domain, second.component, tz)
        total += weight * abs(d1) * float(np.sum(kernel * np.abs(dz) * wz))
    return total


# ============================================================================
# FLUX
# ============================================================================


def flux(field: HarmonicField, curve: SmoothClosedCurve) -> float:
    """∮ ∂u/∂n ds over a counterclockwise curve, n pointing away from its interior.

    Args:
        field: Harmonic field with a gradient evaluator
        curve: Curve inside the field's domain of harmonicity

    Returns:
        float: Trapezoid quadrature on the curve's collocation nodes

    Raises:
        CurveTouchesBoundary: Curve leaves the domain or passes through a pole
    """
    t = geometry.parameter_grid(curve.node_count)
    z, d1, _ = geometry.evaluate_curve(curve, t)
    scale = geometry.curve_diameter(curve)
    if field.domain is not None:
        scale = geometry.diameter(field.domain)
        dist, _, _, _ = geometry.distance_to_boundary(field.domain, z)
        inside = geometry.contains(field.domain, z)
        if not np.all(inside) or float(np.min(dist)) <= 1e-9 * scale:
            raise CurveTouchesBoundary(
                "flux curve touches or leaves the field's domain",
                {"min_distance": float(np.min(dist))},
            )
    for pole in field.poles:
        if np.min(np.abs(z - pole)) <= 1e-9 * scale:
            raise CurveTouchesBoundary(f"flux curve passes through the singularity {pole}")
    gradient = field.gradient(z)
    return float(np.sum(np.real(gradient * 1j * np.conj(d1))) * 2.0 * np.pi / t.size)


# ============================================================================
# EXPLICIT FIELDS AND CLOSED FORMS
# ============================================================================


def log_source(center, strength: float = 1.0, domain: Domain = None) -> LogSource:
    """strength·log|z − center| as a harmonic field on ℂ ∖ {center}."""
    return LogSource(_as_complex(center), strength, domain)


def analytic_field(g, dg, domain: Domain = None) -> AnalyticField:
    """Re g as a harmonic field, given g and its derivative g′."""
    return AnalyticField(g, dg, domain)


def disk_poisson_kernel(z, w, radius: float = 1.0, center=0j) -> float:
    """Closed-form Poisson kernel of the disk |z − center| < radius."""
    rel = _as_complex(z) - _as_complex(center)
    return float((radius**2 - abs(rel) ** 2) / (2.0 * np.pi * radius * abs(_as_complex(w) - _as_complex(z)) ** 2))


def half_plane_poisson_kernel(z, x: float) -> float:
    """Closed-form Poisson kernel of the upper half-plane at boundary point x."""
    z = _as_complex(z)
    return float(z.imag / (np.pi * ((z.real - x) ** 2 + z.imag**2)))


def cayley_disk_kernel(z, w) -> float:
    """Unit-disk Poisson kernel obtained by transporting the half-plane kernel.

    With φ(ζ) = i(1 + ζ)/(1 − ζ) mapping 𝔻 onto ℍ, H_𝔻(z, w) = |φ′(w)|·H_ℍ(φ(z), φ(w)).
    """
    z, w = _as_complex(z), _as_complex(w)
    phi_z = 1j * (1 + z) / (1 - z)
    phi_w = 1j * (1 + w) / (1 - w)
    derivative = abs(2j / (1 - w) ** 2)
    return derivative * half_plane_poisson_kernel(phi_z, phi_w.real)


def restriction_residual(
    outer_domain: Domain, inner_domain: Domain, z, t: Iterable[float]
) -> np.ndarray:
    """Residuals of H_{D₁}(z,w) = H_{D₂}(z,w) + ∮_{∂A} H_{D₂}(z,ζ)·H_{D₁}(ζ,w) ds(ζ).

    D₂ ⊂ D₁ share the outer curve; ∂A ranges over the holes of D₂ that are not
    holes of D₁, and w = γ₀(t) on the shared outer curve.
    """
    if outer_domain.outer != inner_domain.outer:
        raise InputError("restriction identity needs a shared outer curve")
    extra = [k for k, hole in enumerate(inner_domain.holes, start=1) if hole not in outer_domain.holes]
    t = np.atleast_1d(np.asarray(list(t), dtype=float))
    big = poisson_kernel_density(outer_domain, z, 0, t)
    small = poisson_kernel_density(inner_domain, z, 0, t)
    residual = big - small
    for k in extra:
        hole = inner_domain.component(k)
        s = geometry.parameter_grid(hole.node_count)
        zeta, d1, _ = geometry.evaluate_curve(hole, s)
        hit = poisson_kernel_density(inner_domain, z, k, s) * np.abs(d1) * (2.0 * np.pi / s.size)
        for j, tj in enumerate(t):
            kernel = poisson_kernel_field(outer_domain, BoundaryPoint(component=0, t=tj))
            residual[j] -= float(np.sum(hit * kernel.value(zeta)))
    return residual
