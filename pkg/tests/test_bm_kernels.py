"""Tests for the bm_kernels module."""

import numpy as np
import pytest

from src.core.errors import ArcsNotDisjoint, PointsTooClose, PoleTooCloseToBoundary
from src.modules.bm_kernels import service as bm
from src.modules.bm_kernels.schemas import BoundaryArc, BoundaryPoint
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain

LOG2_OVER_PI = np.log(2.0) / np.pi


@pytest.fixture(scope="module")
def tiny_hole() -> Domain:
    """Annulus e^{−2π} < |z| < 1, whose excursion measure between the circles is 1."""
    return Domain(outer=geometry.circle(0, 0, 1), holes=(geometry.circle(0, 0, np.exp(-2 * np.pi)),))


def test_dirichlet_reproduces_linear_data(disk):
    """Boundary data Re z gives u(0.3 + 0.4i) = 0.3."""
    u = bm.solve_dirichlet(disk, lambda z: z.real)
    assert float(u.value([0.3 + 0.4j])[0]) == pytest.approx(0.3, abs=1e-8)


def test_dirichlet_radial_oracle(annulus):
    """1 on the inner circle, 0 outside: value 0.5 at |z| = 0.5."""
    u = bm.solve_dirichlet(annulus, [0.0, 1.0])
    values = u.value(0.5 * np.exp(1j * np.array([0.0, 1.0, 2.5])))
    assert np.max(np.abs(values - 0.5)) < 1e-6


def test_dirichlet_constant_data(two_holes):
    """Constant data gives the constant solution."""
    u = bm.solve_dirichlet(two_holes, 1.0)
    assert np.max(np.abs(u.value([0.0, 0.5j, -0.7 + 0.1j]) - 1.0)) < 1e-10


def test_green_disk_oracle(disk):
    """G(0, 0.5) = log 2/π on the unit disk, rotation invariant."""
    green = bm.greens_function(disk, 0.0)
    assert float(green.value([0.5])[0]) == pytest.approx(LOG2_OVER_PI, abs=1e-8)
    assert float(green.value([0.5j])[0]) == pytest.approx(LOG2_OVER_PI, abs=1e-8)


def test_green_symmetry(three_holes):
    """G(a, b) = G(b, a) on a domain without symmetry."""
    pairs = [(0.0 + 0.1j, 0.6 - 0.3j), (-0.2 - 0.2j, 0.3 + 0.6j), (0.8 + 0.0j, -0.8 - 0.3j)]
    for a, b in pairs:
        ab = float(bm.greens_function(three_holes, a).value([b])[0])
        ba = float(bm.greens_function(three_holes, b).value([a])[0])
        assert ab == pytest.approx(ba, abs=1e-6)
        assert ab > 0


def test_green_pole_near_boundary(disk):
    """A pole outside the disk is rejected."""
    with pytest.raises(PoleTooCloseToBoundary):
        bm.greens_function(disk, 1.5)


def test_poisson_kernel_disk_values(disk):
    """Uniform density from the center and the closed form from z = 0.5."""
    for t in (0.0, 1.3, 4.0):
        assert bm.poisson_kernel(disk, 0.0, BoundaryPoint(component=0, t=t)) == pytest.approx(1 / (2 * np.pi), abs=1e-8)
    value = bm.poisson_kernel(disk, 0.5, BoundaryPoint(component=0, t=0.0))
    assert value == pytest.approx(0.75 / (2 * np.pi * 0.25), abs=1e-6)


def test_poisson_kernel_matches_transported_half_plane(disk):
    """Solver kernel equals the Cayley-transported half-plane kernel."""
    rng = np.random.default_rng(7)
    radii = rng.uniform(0.0, 0.8, 5)
    angles = rng.uniform(0.0, 2 * np.pi, 5)
    for z in radii * np.exp(1j * angles):
        for t in rng.uniform(0.3, 2 * np.pi - 0.3, 5):
            w = np.exp(1j * t)
            exact = bm.cayley_disk_kernel(z, w)
            assert exact == pytest.approx(bm.disk_poisson_kernel(z, w), rel=1e-12)
            value = bm.poisson_kernel(disk, z, BoundaryPoint(component=0, t=t))
            assert value == pytest.approx(exact, rel=1e-6)


def test_poisson_kernel_scaled_disk():
    """On 2𝔻 the density from 0 is half the unit-disk value."""
    big = Domain(outer=geometry.circle(0, 0, 2))
    assert bm.poisson_kernel(big, 0.0, BoundaryPoint(component=0, t=0.0)) == pytest.approx(1 / (4 * np.pi), abs=1e-8)


def test_poisson_kernel_field_matches_density(annulus):
    """The first-argument field agrees with the density from the Green solve."""
    w = BoundaryPoint(component=0, t=0.7)
    field = bm.poisson_kernel_field(annulus, w)
    for z in (0.5, -0.3 + 0.5j, 0.1 - 0.7j):
        assert float(field.value([z])[0]) == pytest.approx(bm.poisson_kernel(annulus, z, w), abs=1e-7)


def test_harmonic_measure_gamblers_ruin(annulus):
    """Inner circle seen from |z| = 0.5 has measure one half."""
    assert bm.harmonic_measure(annulus, 0.5j, 1) == pytest.approx(0.5, abs=1e-6)


def test_harmonic_measure_normalization(two_holes):
    """Component measures add up to 1."""
    z = 0.3j
    total = sum(bm.harmonic_measure(two_holes, z, k) for k in range(3))
    assert total == pytest.approx(1.0, abs=1e-8)


def test_outer_measure_complements_hole(annulus):
    """ω₀ + ω₁ = 1 on the annulus."""
    z = np.array([0.5, 0.4j, -0.7 + 0.1j])
    total = bm.outer_measure(annulus).value(z) + bm.h_basis(annulus, 1).value(z)
    assert np.allclose(total, 1.0, atol=1e-8)
    assert float(bm.outer_measure(annulus).value([0.5])[0]) == pytest.approx(0.5, abs=1e-6)


def test_harmonic_measure_half_circle(disk):
    """Half of the circle from the center."""
    arc = BoundaryArc(component=0, t0=0.0, t1=np.pi)
    assert bm.harmonic_measure(disk, 0.0, arc) == pytest.approx(0.5, abs=1e-8)


def test_excursion_measure_oracle(tiny_hole):
    """ℰ(inner, outer) = 2π/log(1/r) = 1 and is invariant under scaling."""
    assert bm.excursion_measure(tiny_hole, 1, 0) == pytest.approx(1.0, abs=1e-5)
    scaled = geometry.transform_domain(tiny_hole, 3.0)
    assert bm.excursion_measure(scaled, 1, 0) == pytest.approx(bm.excursion_measure(tiny_hole, 1, 0), abs=1e-6)


def test_excursion_measure_overlap(disk):
    """Overlapping arcs raise ArcsNotDisjoint."""
    first = BoundaryArc(component=0, t0=0.0, t1=1.0)
    second = BoundaryArc(component=0, t0=0.5, t1=2.0)
    with pytest.raises(ArcsNotDisjoint):
        bm.excursion_measure(disk, first, second)


def test_boundary_poisson_kernel_symmetry(annulus):
    """H_∂D(w, z) = H_∂D(z, w) for points on different components."""
    w = BoundaryPoint(component=0, t=0.4)
    z = BoundaryPoint(component=1, t=2.0)
    forward = bm.boundary_poisson_kernel(annulus, w, z)
    backward = bm.boundary_poisson_kernel(annulus, z, w)
    assert forward > 0
    assert forward == pytest.approx(backward, abs=1e-6)


def test_boundary_poisson_kernel_diagonal(disk):
    """Coincident points are refused."""
    w = BoundaryPoint(component=0, t=1.0)
    with pytest.raises(PointsTooClose):
        bm.boundary_poisson_kernel(disk, w, w)


def test_h_basis_radial_oracle(annulus):
    """ω₁ is log|z|/log r, also right next to the hole."""
    omega = bm.h_basis(annulus, 1)
    assert float(omega.value([0.5])[0]) == pytest.approx(0.5, abs=1e-6)
    assert float(omega.value([0.251])[0]) == pytest.approx(np.log(0.251) / np.log(0.25), abs=1e-6)


def test_flux_oracles(annulus):
    """Entire fields have no flux; −log|z| has flux −2π; ω₁ across the collar has −2π/log 4."""
    circle = geometry.circle(0.1, 0.1, 0.3)
    assert bm.flux(bm.analytic_field(lambda z: z, lambda z: np.ones_like(z)), circle) == pytest.approx(0.0, abs=1e-10)
    assert bm.flux(bm.log_source(0.0, -1.0), geometry.circle(0, 0, 0.5)) == pytest.approx(-2 * np.pi, abs=1e-8)
    collar = geometry.collar_curve(annulus, 1).curve
    assert bm.flux(bm.h_basis(annulus, 1), collar) == pytest.approx(-2 * np.pi / np.log(4), abs=1e-6)


def test_restriction_identity(disk):
    """Disk kernel equals the holed-domain kernel plus the hole's redistribution."""
    holed = Domain(outer=disk.outer, holes=(geometry.circle(0.2, 0.1, 0.25),))
    t = np.linspace(0.0, 2 * np.pi, 10, endpoint=False)
    residual = bm.restriction_residual(disk, holed, -0.4 + 0.3j, t)
    assert np.max(np.abs(residual)) < 1e-5
