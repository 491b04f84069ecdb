"""Smoke tests for the ERBM toolkit."""

import os
import sys

import pytest

# Ensure src is in pythonpath
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))


def test_project_structure():
    """Verify critical directories exist."""
    for path in ("src", "src/modules", "src/core", "bundled", "docs/LOGIC.md", "GOVERNANCE.md"):
        assert os.path.exists(os.path.join(ROOT, path)), f"{path} missing"


@pytest.mark.parametrize("module", ["geometry", "bm_kernels", "erbm", "slitmap", "sampler", "cli"])
def test_module_imports(module):
    """Every module exposes its public service."""
    package = __import__(f"src.modules.{module}", fromlist=["service", "schemas"])
    assert package.service is not None
    assert package.schemas is not None


def test_bundled_domains_load(disk, annulus, two_holes):
    """The bundled domains parse with 0, 1 and 2 holes."""
    assert (disk.n, annulus.n, two_holes.n) == (0, 1, 2)


def test_settings_defaults():
    """Configuration exposes the numerical defaults."""
    from src.core.config import settings

    assert settings.NODES > 0
    assert 0 < settings.COLLAR < 1
    assert settings.APP_NAME
