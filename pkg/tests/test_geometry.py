"""Tests for the geometry module."""

import numpy as np
import pytest

from src.core.errors import ClearanceTooSmall, DegenerateCurve, DomainParseError
from src.modules.geometry import service as geometry
from src.modules.geometry.models import CurveKind, DomainIssue
from src.modules.geometry.schemas import Domain


def test_circle_starts_on_positive_axis():
    """The unit circle has γ(0) = 1 and an inward normal pointing at the origin."""
    curve = geometry.make_curve(CurveKind.CIRCLE, 0j, radius=1.0)
    g = geometry.curve_geometry(curve, 0.0)
    assert g.point.as_complex() == pytest.approx(1.0)
    assert g.normal.as_complex() == pytest.approx(-1.0)


def test_round_ellipse_matches_circle():
    """An ellipse with equal semi-axes traces the unit circle."""
    t = geometry.parameter_grid(64)
    a, _, _ = geometry.evaluate_curve(geometry.ellipse(0, 0, 1, 1, 0), t)
    b, _, _ = geometry.evaluate_curve(geometry.circle(0, 0, 1), t)
    assert np.max(np.abs(a - b)) < 1e-14


def test_single_mode_fourier_is_unit_circle():
    """Only c₁ = 1 gives the unit circle."""
    curve = geometry.fourier(0, 0, [0, 0, 1])
    z, _, _ = geometry.evaluate_curve(curve, geometry.parameter_grid(64))
    assert np.max(np.abs(np.abs(z) - 1.0)) < 1e-14


def test_clockwise_fourier_is_reoriented():
    """A clockwise descriptor is flipped to counterclockwise."""
    curve = geometry.fourier(0, 0, [1, 0, 0])
    z, _, _ = geometry.evaluate_curve(curve, geometry.parameter_grid(256))
    area = 0.5 * np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag)
    assert area > 0


def test_degenerate_circle_is_rejected():
    """A zero radius raises DegenerateCurve."""
    with pytest.raises(DegenerateCurve):
        geometry.circle(0, 0, 0.0)


def test_curve_geometry_speeds():
    """Circle and ellipse speeds match their closed forms."""
    top = geometry.curve_geometry(geometry.circle(0, 0, 1), np.pi / 2)
    assert top.point.as_complex() == pytest.approx(1j)
    assert top.speed == pytest.approx(1.0)
    for t in (0.0, 1.0, 4.0):
        assert geometry.curve_geometry(geometry.circle(0, 0, 2), t).speed == pytest.approx(2.0)
    end = geometry.curve_geometry(geometry.ellipse(0, 0, 2, 1, 0), 0.0)
    assert end.point.as_complex() == pytest.approx(2.0)
    assert end.speed == pytest.approx(1.0)


def test_hole_normal_points_into_domain(annulus):
    """On a hole the domain normal points away from the hole."""
    g = geometry.boundary_geometry(annulus, 1, 0.0)
    assert g.normal.as_complex() == pytest.approx(1.0)


def test_annulus_is_valid(annulus):
    """The bundled annulus has no issues."""
    assert geometry.validate_domain(annulus).valid


def test_overlapping_holes_are_reported():
    """Two holes with overlapping closures give HolesIntersect."""
    domain = Domain(
        outer=geometry.circle(0, 0, 1),
        holes=(geometry.circle(-0.1, 0, 0.2), geometry.circle(0.1, 0, 0.2)),
    )
    report = geometry.validate_domain(domain)
    assert DomainIssue.HOLES_INTERSECT.value in report.codes()


def test_hole_outside_outer_is_reported():
    """A hole centered outside the outer curve gives HoleOutsideOuter."""
    domain = Domain(outer=geometry.circle(0, 0, 1), holes=(geometry.circle(3, 0, 0.2),))
    assert geometry.validate_domain(domain).codes() == (DomainIssue.HOLE_OUTSIDE_OUTER.value,)


def test_annulus_collar_radius(annulus):
    """Factor 0.5 puts the collar at radius 0.25 + 0.5·0.75."""
    collar = geometry.collar_curve(annulus, 1, 0.5)
    _, z = geometry.sample_curve(collar.curve, 128)
    assert np.max(np.abs(np.abs(z) - 0.625)) < 1e-8


def test_two_hole_collars_wind_once(two_holes):
    """Each collar encloses its own hole only."""
    for i in (1, 2):
        collar = geometry.collar_curve(two_holes, i)
        winding = geometry.winding_number(collar.curve, [-0.45, 0.45])
        expected = [1.0, 0.0] if i == 1 else [0.0, 1.0]
        assert np.allclose(winding, expected, atol=1e-6)


def test_tight_collar_raises():
    """Factor 0.99 between nearly touching holes leaves no room."""
    domain = Domain(
        outer=geometry.circle(0, 0, 1),
        holes=(geometry.circle(-0.2, 0, 0.19), geometry.circle(0.2, 0, 0.19)),
    )
    with pytest.raises(ClearanceTooSmall):
        geometry.collar_curve(domain, 1, 0.99)


def test_parse_domain_reports_line():
    """A bad statement is reported with its line number."""
    text = "# comment\nouter circle 0 0 1\nhole square 0 0 1\n"
    with pytest.raises(DomainParseError) as info:
        geometry.parse_domain(text)
    assert info.value.details["line"] == 3


def test_parse_domain_line_map():
    """Component indices map back to their source lines."""
    text = "outer circle 0 0 1\n\nhole ellipse 0.3 0 0.1 0.05 0.2\nhole fourier -0.4 0 1 0 0 0 0 0.1 0\n"
    domain, lines = geometry.parse_domain(text)
    assert domain.n == 2
    assert lines == {0: 1, 1: 3, 2: 4}


def test_transform_domain_scales_diameter(annulus):
    """A similarity by 3 triples the diameter and keeps validity."""
    image = geometry.transform_domain(annulus, 3.0, 0.4, 1 + 1j)
    assert geometry.diameter(image) == pytest.approx(3 * geometry.diameter(annulus))
    assert geometry.validate_domain(image).valid


def test_distance_to_boundary(annulus):
    """Nearest component and distance in the annulus."""
    dist, component, _, projection = geometry.distance_to_boundary(annulus, [0.5, 0.9j])
    assert dist == pytest.approx([0.25, 0.1], abs=1e-9)
    assert list(component) == [1, 0]
    assert projection[1] == pytest.approx(1j, abs=1e-9)


def test_contains_excludes_hole(annulus):
    """Points in the hole are outside the domain."""
    assert list(geometry.contains(annulus, [0.0, 0.5, 1.5])) == [False, True, False]


def test_interior_point_of_ellipse():
    """interior_point returns the center of a convex curve."""
    assert geometry.interior_point(geometry.ellipse(1, 2, 0.5, 0.2, 0.3)) == pytest.approx(1 + 2j)
