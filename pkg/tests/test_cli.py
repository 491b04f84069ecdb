"""Tests for the command-line surface."""

import numpy as np
import pytest

from src.modules.cli.models import ExitCode
from src.modules.cli.service import run

OVERLAPPING = "outer circle 0 0 1\nhole circle -0.1 0 0.2\nhole circle 0.1 0 0.2\n"


def _entries(text: str) -> dict:
    """Report lines as {key: value}, annotations stripped."""
    entries = {}
    for line in text.splitlines():
        if " = " in line:
            key, rest = line.split(" = ", 1)
            entries[key] = rest.split(" # ", 1)[0]
    return entries


def test_missing_command_is_usage_error():
    """No subcommand exits 2."""
    assert run([]) == ExitCode.USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["pk", "--domain", "bundled/disk.dom"],
        ["er-green", "--domain", "bundled/annulus.dom"],
        ["trace", "--domain", "bundled/disk.dom", "--w", "0"],
        ["chain", "--domain", "bundled/annulus.dom", "--collar", "1.5"],
        ["chain"],
        ["pk", "--domain", "bundled/disk.dom", "--z", "0.1"],
        ["chain", "--domain", "bundled/annulus.dom", "--paths", "0"],
        ["chain", "--domain", "bundled/annulus.dom", "--workers", "0"],
        ["chain", "--domain", "bundled/annulus.dom", "--nodes", "4"],
        ["chain", "--domain", "bundled/annulus.dom", "--seed", "-1"],
        ["chain", "--domain", "bundled/annulus.dom", "--log-level", "bogus"],
    ],
)
def test_usage_errors(argv, tmp_path):
    """Missing, malformed or out-of-range flags exit 2."""
    assert run(argv + ["--output", str(tmp_path)]) == ExitCode.USAGE


def test_invalid_domain_names_issue_and_lines(tmp_path, capsys):
    """Overlapping holes exit 2 and name the issue with its source lines."""
    bad = tmp_path / "bad.dom"
    bad.write_text(OVERLAPPING, encoding="utf-8")
    assert run(["chain", "--domain", str(bad), "--output", str(tmp_path)]) == ExitCode.USAGE
    err = capsys.readouterr().err
    assert "HolesIntersect" in err
    assert "2, 3" in err


@pytest.mark.parametrize("hole", ["0", "3"])
def test_map_bilateral_rejects_hole_index(bundled_dir, tmp_path, hole):
    """Hole indices outside 1..n exit 2 instead of mapping another hole."""
    argv = ["map-bilateral", "--domain", str(bundled_dir / "two_holes.dom"), "--hole", hole, "--output", str(tmp_path)]
    assert run(argv) == ExitCode.USAGE


def test_log_level_is_case_insensitive(bundled_dir, tmp_path):
    """Lower-case level names are accepted."""
    argv = ["chain", "--domain", str(bundled_dir / "annulus.dom"), "--log-level", "debug", "--output", str(tmp_path)]
    assert run(argv) == ExitCode.SUCCESS


def test_unreadable_domain(tmp_path):
    """A missing file is a parse error."""
    assert run(["chain", "--domain", str(tmp_path / "missing.dom"), "--output", str(tmp_path)]) == ExitCode.USAGE


def test_pk_disk_center(bundled_dir, tmp_path, capsys):
    """The disk kernel from the center is 1/(2π); grid and figure are written."""
    argv = ["pk", "--domain", str(bundled_dir / "disk.dom"), "--z", "0,0", "--output", str(tmp_path)]
    assert run(argv) == ExitCode.SUCCESS
    entries = _entries(capsys.readouterr().out)
    assert float(entries["poisson_kernel"]) == pytest.approx(1 / (2 * np.pi), abs=1e-8)
    assert float(entries["harmonic_measures"].strip("[]")) == pytest.approx(1.0, abs=1e-8)
    assert (tmp_path / "pk.csv").read_text().startswith("x,y,value")
    assert (tmp_path / "pk.svg").exists()
    assert (tmp_path / "pk.report.txt").exists()


def test_map_bilateral_annulus(bundled_dir, tmp_path, capsys):
    """The annulus keeps its inner radius 1/4."""
    argv = ["map-bilateral", "--domain", str(bundled_dir / "annulus.dom"), "--hole", "1", "--output", str(tmp_path)]
    assert run(argv) == ExitCode.SUCCESS
    entries = _entries(capsys.readouterr().out)
    assert float(entries["inner_radius"]) == pytest.approx(0.25, abs=1e-5)
    assert entries["check.slitmap.unit_circle"]
    assert (tmp_path / "map-bilateral.image.svg").exists()


def test_chain_report(bundled_dir, tmp_path, capsys):
    """Chain rows are stochastic and every hole start is absorbed."""
    argv = ["chain", "--domain", str(bundled_dir / "two_holes.dom"), "--output", str(tmp_path)]
    assert run(argv) == ExitCode.SUCCESS
    entries = _entries(capsys.readouterr().out)
    assert entries["holes"] == "2"
    assert "p_tilde" in entries
    assert float(entries["spectral_radius"]) < 1


def test_no_timestamp_is_reproducible(bundled_dir, tmp_path):
    """Two runs without timestamps write byte-identical reports."""
    first, second = tmp_path / "a", tmp_path / "b"
    base = ["er-pk", "--domain", str(bundled_dir / "two_holes.dom"), "--z", "0,0.5", "--no-timestamp"]
    assert run(base + ["--output", str(first)]) == ExitCode.SUCCESS
    assert run(base + ["--output", str(second)]) == ExitCode.SUCCESS
    report = "er-pk.report.txt"
    assert (first / report).read_bytes() == (second / report).read_bytes()
    assert "timestamp" not in (first / report).read_text()


def test_timestamp_lines_present(bundled_dir, tmp_path):
    """Timing lines are written by default."""
    assert run(["chain", "--domain", str(bundled_dir / "annulus.dom"), "--output", str(tmp_path)]) == ExitCode.SUCCESS
    text = (tmp_path / "chain.report.txt").read_text()
    assert "timestamp = " in text
    assert "elapsed = " in text


def test_validate_annulus(bundled_dir, tmp_path, capsys):
    """Every suite passes on the annulus and the matrix row is printed."""
    argv = [
        "validate",
        "--domain",
        str(bundled_dir / "annulus.dom"),
        "--paths",
        "400",
        "--output",
        str(tmp_path),
        "--no-timestamp",
    ]
    assert run(argv) == ExitCode.SUCCESS
    entries = _entries(capsys.readouterr().out)
    assert "matrix.annulus" in entries
    assert any(key.startswith("check.annulus.sampler.") for key in entries)
