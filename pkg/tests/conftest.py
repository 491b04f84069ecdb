"""Shared domains for the test suite."""

import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.modules.cli.validation import BUNDLED_DIR  # noqa: E402
from src.modules.geometry import service as geometry  # noqa: E402
from src.modules.geometry.schemas import Domain  # noqa: E402


@pytest.fixture(scope="session")
def bundled_dir():
    return BUNDLED_DIR


@pytest.fixture(scope="session")
def disk() -> Domain:
    domain, _ = geometry.load_domain(BUNDLED_DIR / "disk.dom")
    return domain


@pytest.fixture(scope="session")
def annulus() -> Domain:
    domain, _ = geometry.load_domain(BUNDLED_DIR / "annulus.dom")
    return domain


@pytest.fixture(scope="session")
def two_holes() -> Domain:
    domain, _ = geometry.load_domain(BUNDLED_DIR / "two_holes.dom")
    return domain


@pytest.fixture(scope="session")
def three_holes() -> Domain:
    """Unequal holes without symmetry, one of them an ellipse."""
    return Domain(
        outer=geometry.ellipse(0.0, 0.0, 1.2, 1.0, 0.1),
        holes=(
            geometry.circle(-0.5, 0.2, 0.15),
            geometry.ellipse(0.45, 0.25, 0.2, 0.1, 0.7),
            geometry.circle(0.05, -0.5, 0.12),
        ),
    )
