"""Tests for the slitmap module."""

import numpy as np
import pytest

from src.core.errors import PathTooCloseToBoundary, PlateauLevel
from src.modules.bm_kernels import service as bm
from src.modules.bm_kernels.schemas import BoundaryPoint
from src.modules.erbm import service as erbm
from src.modules.slitmap import service as slitmap
from src.modules.slitmap.models import ConjugateRole


def test_conjugate_of_imaginary_part():
    """For v = Im z the conjugate change is Re z₁ − Re z₀, with or without waypoints."""
    v = bm.analytic_field(lambda z: -1j * z, lambda z: -1j * np.ones_like(z))
    assert slitmap.harmonic_conjugate(v, 0.0, 1 + 1j) == pytest.approx(1.0, abs=1e-12)
    assert slitmap.harmonic_conjugate(v, 0.0, 2.0, path=[1j, 3 + 2j]) == pytest.approx(2.0, abs=1e-12)


def test_conjugate_of_real_part():
    """For u = Re z² the REAL role integrates Im z²."""
    u = bm.analytic_field(lambda z: z**2, lambda z: 2 * z)
    z = 0.3 + 0.4j
    assert slitmap.harmonic_conjugate(u, 0.0, z, role=ConjugateRole.REAL) == pytest.approx((z**2).imag, abs=1e-12)


def test_conjugate_path_near_pole():
    """A path through the source of log|z| is refused."""
    field = bm.log_source(0.0, 1.0)
    with pytest.raises(PathTooCloseToBoundary):
        slitmap.harmonic_conjugate(field, -1.0, 1.0)


def test_chordal_disk_oracle(disk):
    """On the disk with w = 1 the map is (i/2π)·(1 + z)/(1 − z)."""
    f, image = slitmap.chordal_map(disk, BoundaryPoint(component=0, t=0.0))
    assert image.slits == ()
    assert f(0.0).imag == pytest.approx(1 / (2 * np.pi), abs=1e-6)
    assert f(0.5j).real - f(0.0).real == pytest.approx(-0.8 / (2 * np.pi), abs=1e-6)


def test_chordal_map_refuses_infinity(disk):
    """Evaluation next to w is refused."""
    f, _ = slitmap.chordal_map(disk, 0.0)
    with pytest.raises(PathTooCloseToBoundary):
        f(0.999)


def test_chordal_slits_are_flat(two_holes):
    """Holes go to horizontal slits at their ER Poisson heights."""
    _, image = slitmap.chordal_map(two_holes, np.pi / 2)
    kernel = erbm.er_poisson_kernel(two_holes, np.pi / 2)
    assert len(image.slits) == 2
    for slit in image.slits:
        assert slit.height == pytest.approx(kernel.component_value(slit.hole_index))
        assert slit.flatness < 1e-6
        assert slit.x_min < slit.x_max
    first, second = image.slits
    assert first.height == pytest.approx(second.height, abs=1e-6)
    assert first.x_max < second.x_min or second.x_max < first.x_min


def test_bilateral_annulus(annulus):
    """The concentric annulus maps to itself: ρ = 1/4 and |f(z)| = |z|."""
    f, image = slitmap.bilateral_map(annulus, 1)
    assert image.inner_radius == pytest.approx(0.25, abs=1e-5)
    assert image.arcs == ()
    z = np.array([0.5, 0.4j, -0.7 + 0.1j, 0.3 - 0.6j])
    assert np.max(np.abs(np.abs(f(z)) - np.abs(z))) < 1e-5
    assert slitmap.boundary_correspondence(f) < 1e-5


def test_bilateral_conjugate_period(two_holes):
    """ψ of π·G^{ER}(A₁, ·) winds by −2π around hole 1 and not around hole 2."""
    u = np.pi * erbm.er_green_component(two_holes, 1)
    assert slitmap.conjugate_period(u, two_holes, 1) == pytest.approx(-2 * np.pi, abs=1e-4)
    assert slitmap.conjugate_period(u, two_holes, 2) == pytest.approx(0.0, abs=1e-4)


def test_bilateral_arcs(two_holes):
    """The second hole becomes an arc strictly inside the ring."""
    _, image = slitmap.bilateral_map(two_holes, 1)
    (arc,) = image.arcs
    assert arc.hole_index == 2
    assert image.inner_radius < arc.radius < 1.0
    assert arc.radial_deviation < 1e-5
    assert arc.angle_max - arc.angle_min < 2 * np.pi


def test_radial_disk_is_identity_modulus(disk):
    """For z₀ = 0 on the disk |f(z)| = |z| and f(0) = 0."""
    f, image = slitmap.radial_map(disk, 0.0)
    z = np.array([0.5, 0.3j, -0.2 - 0.6j])
    assert np.max(np.abs(np.abs(f(z)) - np.abs(z))) < 1e-6
    assert f(0.0) == 0
    assert image.center.as_complex() == 0


def test_radial_boundary_correspondence(three_holes):
    """∂A₀ lands on the unit circle."""
    f, image = slitmap.radial_map(three_holes, 0.1 + 0.1j)
    assert slitmap.boundary_correspondence(f) < 1e-5
    assert all(0 < arc.radius < 1 for arc in image.arcs)


@pytest.mark.parametrize(
    "name, z0, points",
    [
        ("annulus", 0.6, [-0.6, 0.6j, -0.4 - 0.45j]),
        ("two_holes", 0.5j, [0.0, -0.5j, 0.3 + 0.6j]),
    ],
)
def test_radial_cauchy_riemann(request, name, z0, points):
    """The exponent of the radial map satisfies Cauchy–Riemann to 1e-5."""
    f, _ = slitmap.radial_map(request.getfixturevalue(name), z0)
    assert f.cauchy_riemann_residual(points) < 1e-5


def test_conjugate_homotopic_paths_agree(two_holes):
    """Two paths between the holes give the same conjugate change of ω₁."""
    omega = bm.h_basis(two_holes, 1)
    right = slitmap.harmonic_conjugate(omega, -0.6j, 0.6j, path=[0.1], role=ConjugateRole.REAL)
    left = slitmap.harmonic_conjugate(omega, -0.6j, 0.6j, path=[-0.1], role=ConjugateRole.REAL)
    assert abs(right - left) < 1e-6 * 2.0


def test_trace_circle_of_log(disk):
    """−log|z| at level log 2 is the circle |z| = 1/2."""
    field = bm.log_source(0.0, -1.0, disk)
    curve = slitmap.trace_level_curve(field, np.log(2.0))
    assert np.max(np.abs(np.abs(curve.array) - 0.5)) < 1e-8
    assert curve.closure_gap < 1e-6
    assert curve.simple
    assert curve.through_pole is None
    assert slitmap.separation_check(field, curve, probes=200) == 0


def test_trace_poisson_kernel_through_pole(disk):
    """H(·, 1) = 1/(2π) on the disk is the circle |z − 1/2| = 1/2 through w."""
    field = bm.poisson_kernel_field(disk, BoundaryPoint(component=0, t=0.0))
    curve = slitmap.trace_level_curve(field, 1 / (2 * np.pi))
    assert curve.through_pole is not None
    assert curve.through_pole.as_complex() == pytest.approx(1.0, abs=1e-12)
    points = curve.array
    away = points[np.abs(points - 1.0) > 0.05]
    assert np.max(np.abs(np.abs(away - 0.5) - 0.5)) < 1e-5


def test_trace_refuses_plateau(annulus):
    """A level at a hole constant is refused."""
    field = erbm.er_green_component(annulus, 1)
    with pytest.raises(PlateauLevel):
        slitmap.trace_level_curve(field, field.component_value(1))


def test_field_diagnostics_flags_constant(disk):
    """A constant field has no gradient anywhere."""
    constant = bm.analytic_field(lambda z: np.ones_like(z), lambda z: np.zeros_like(z), disk)
    assert slitmap.field_diagnostics(constant, resolution=32).flagged


def test_field_diagnostics_sublevel_components(disk):
    """{−log|z| ≤ r} is one annulus attached to the outer curve."""
    field = bm.log_source(0.0, -1.0, disk)
    report = slitmap.field_diagnostics(field, levels=[0.5, 1.0], resolution=64)
    assert not report.flagged
    assert report.component_counts == (1, 1)
