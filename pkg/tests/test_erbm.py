"""Tests for the erbm module."""

import numpy as np
import pytest

from src.core.errors import InputError
from src.modules.bm_kernels import service as bm
from src.modules.bm_kernels.schemas import BoundaryArc, BoundaryPoint
from src.modules.erbm import service as erbm

LOG2_OVER_PI = np.log(2.0) / np.pi
Q_OUTER = np.log(2.5) / np.log(4.0)


def test_annulus_period_matrix(annulus):
    """P = [−2π/log 4] on the concentric annulus."""
    p = erbm.period_matrix(annulus).array
    assert p.shape == (1, 1)
    assert p[0, 0] == pytest.approx(-2 * np.pi / np.log(4.0), abs=1e-5)


def test_period_matrix_symmetric_negative(three_holes):
    """P is symmetric and negative definite on an asymmetric domain."""
    pm = erbm.period_matrix(three_holes)
    assert pm.asymmetry < 1e-6
    assert np.all(pm.eigenvalues < 0)


def test_period_matrix_empty_for_disk(disk):
    """No holes, no periods."""
    assert erbm.period_matrix(disk).array.shape == (0, 0)


def test_constant_data_is_er_harmonic(two_holes):
    """Data ≡ 1 gives u ≡ 1 with every constant 1."""
    solution = erbm.solve_er_harmonic(two_holes, 1.0)
    assert np.allclose(solution.constants, 1.0, atol=1e-8)
    assert float(solution.value([0.1j])[0]) == pytest.approx(1.0, abs=1e-8)


def test_mirror_symmetric_constants(two_holes):
    """Data symmetric under z ↦ −z̄ gives equal hole constants."""
    solution = erbm.solve_er_harmonic(two_holes, lambda z: z.imag**2)
    c1, c2 = solution.constants
    assert c1 == pytest.approx(c2, abs=1e-6)


def test_er_harmonic_has_zero_flux(three_holes):
    """ER-harmonic solutions carry no flux around any hole."""
    solution = erbm.solve_er_harmonic(three_holes, lambda z: z.real)
    assert np.max(np.abs(erbm.flux_residuals(solution, three_holes))) < 1e-6


def test_er_poisson_kernel_reduces_on_disk(disk):
    """Without holes the ER kernel is the Poisson kernel."""
    w = BoundaryPoint(component=0, t=0.8)
    field = erbm.er_poisson_kernel(disk, w)
    for z in (0.0, 0.3 - 0.2j):
        assert float(field.value([z])[0]) == pytest.approx(bm.poisson_kernel(disk, z, w), abs=1e-6)


def test_er_poisson_kernel_positive_and_flux_free(two_holes):
    """H^{ER}(·, w) is positive inside and flux free around both holes."""
    field = erbm.er_poisson_kernel(two_holes, 1.0)
    assert np.all(field.value([0.0, 0.5j, -0.7j, -0.8]) > 0)
    assert np.max(np.abs(erbm.flux_residuals(field, two_holes))) < 1e-6


def test_er_poisson_kernel_needs_outer_point(annulus):
    """w on a hole is refused."""
    with pytest.raises(InputError):
        erbm.er_poisson_kernel(annulus, BoundaryPoint(component=1, t=0.0))


def test_er_green_reduces_on_disk(disk):
    """G^{ER}(0, 0.5) = log 2/π on the disk."""
    assert float(erbm.er_green(disk, 0.0).value([0.5])[0]) == pytest.approx(LOG2_OVER_PI, abs=1e-6)


def test_er_green_component_annulus(annulus):
    """G^{ER}(A₁, ·) = −log|z|/π, zero on the outer circle."""
    field = erbm.er_green_component(annulus, 1)
    assert float(field.value([0.5j])[0]) == pytest.approx(LOG2_OVER_PI, abs=1e-6)
    values, _ = field.boundary(0, np.linspace(0, 2 * np.pi, 7))
    assert np.max(np.abs(values)) < 1e-6


def test_er_green_component_source_flux(two_holes):
    """π·G^{ER}(A₁, ·) has flux −2π around hole 1 and none around hole 2."""
    field = erbm.er_green_component(two_holes, 1)
    fluxes = erbm.flux_residuals(np.pi * field, two_holes)
    assert fluxes == pytest.approx([-2 * np.pi, 0.0], abs=1e-6)


def test_restart_density_annulus(annulus):
    """Uniform density 1/(2π·0.625) with unit mass."""
    density = erbm.restart_density(annulus, 1, 0.5)
    assert density.mass() == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(density.density, 1 / (2 * np.pi * 0.625), atol=1e-6)
    points = density.sample_points(np.linspace(0.0, 0.99, 5))
    assert np.allclose(np.abs(points), 0.625, atol=1e-8)


def test_boundary_chain_annulus(annulus):
    """Gambler's ruin from the collar at radius 0.625."""
    chain = erbm.boundary_chain(annulus, 0.5)
    assert chain.q_array[0, 0] == pytest.approx(Q_OUTER, abs=1e-6)
    assert chain.q_array[0, 1] == pytest.approx(1 - Q_OUTER, abs=1e-6)
    assert chain.p_array[0, 0] == pytest.approx(1.0, abs=1e-10)


def test_boundary_chain_rows_and_symmetry(two_holes):
    """Rows sum to 1 before normalization; mirror holes exchange with equal probability."""
    chain = erbm.boundary_chain(two_holes)
    assert chain.row_sum_deviation < 1e-8
    assert np.allclose(chain.q_array.sum(axis=1), 1.0, atol=1e-10)
    assert np.allclose(chain.p_array.sum(axis=1), 1.0, atol=1e-10)
    assert chain.p_array[0, 2] == pytest.approx(chain.p_array[1, 1], abs=1e-6)


def test_chain_collar_independence(two_holes):
    """p̃ does not depend on the collar factor."""
    low = erbm.boundary_chain(two_holes, 0.4).p_array
    high = erbm.boundary_chain(two_holes, 0.6).p_array
    assert np.max(np.abs(low - high)) < 1e-4


def test_chain_fundamentals_absorb(two_holes):
    """Every hole start is eventually absorbed on the outer curve."""
    result = erbm.chain_fundamentals(erbm.boundary_chain(two_holes))
    assert np.allclose(result.absorption, 1.0, atol=1e-10)
    assert result.spectral_radius < 1


def test_er_harmonic_measure_whole_and_half(annulus):
    """The whole outer curve has measure 1; half of it 1/2 from the hole."""
    assert erbm.er_harmonic_measure(annulus, 0.5, BoundaryArc.component_arc(0)) == pytest.approx(1.0, abs=1e-8)
    half = BoundaryArc(component=0, t0=0.3, t1=0.3 + np.pi)
    assert erbm.er_harmonic_measure(annulus, 1, half) == pytest.approx(0.5, abs=1e-6)


def test_outer_exit_density_normalized(two_holes):
    """H^{ER}(A_i, ·) integrates to 1 over the unit circle."""
    t = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
    density = erbm.outer_exit_density(two_holes, 1, t)
    assert np.all(density > 0)
    assert float(np.sum(density) * 2 * np.pi / t.size) == pytest.approx(1.0, abs=1e-6)
