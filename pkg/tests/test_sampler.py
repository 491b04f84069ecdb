"""Tests for the sampler module.

Monte Carlo checks use a fixed seed and a few thousand paths with a looser
capture distance than the default, so they stay quick and reproducible.
"""

import numpy as np
import pytest

from src.core.errors import InputError
from src.modules.erbm import service as erbm
from src.modules.sampler import service as sampler
from src.modules.sampler.schemas import RunConfig
from src.modules.sampler.streams import split_paths, worker_stream

SEED = 20240601


def _config(paths: int, workers: int = 1) -> RunConfig:
    return RunConfig(seed=SEED, epsilon=1e-4, path_count=paths, worker_count=workers)


def test_split_paths_is_contiguous():
    """Block sizes add up and differ by at most one."""
    sizes = split_paths(10, 4)
    assert sizes == [3, 3, 2, 2]
    assert split_paths(2, 4) == [1, 1, 0, 0]


def test_worker_streams_differ():
    """Each worker gets its own Philox stream."""
    a = worker_stream(SEED, 0).random(4)
    b = worker_stream(SEED, 1).random(4)
    assert not np.allclose(a, b)
    assert np.array_equal(a, worker_stream(SEED, 0).random(4))


def test_disk_exits_are_uniform(disk):
    """Exits from the center pass a chi-square uniformity test."""
    rng = worker_stream(SEED, 0)
    _, components, t = sampler.sample_exits(disk, np.zeros(8000), _config(1), rng)
    assert np.all(components == 0)
    counts, _ = np.histogram(np.mod(t, 2 * np.pi), bins=16, range=(0.0, 2 * np.pi))
    assert sampler.uniformity_pvalue(counts) > 1e-3


def test_annulus_inner_frequency(annulus):
    """From |z| = 0.5 half of the walks hit the inner circle."""
    n = 8000
    rng = worker_stream(SEED, 0)
    _, components, _ = sampler.sample_exits(annulus, np.full(n, 0.5 + 0j), _config(1), rng)
    frequency = float(np.mean(components == 1))
    assert abs(frequency - 0.5) < 4 * np.sqrt(0.25 / n)


def test_wos_exit_lands_on_boundary(annulus):
    """A single exit is a boundary point of the reported component."""
    point, component = sampler.wos_exit(annulus, 0.5j, _config(1))
    radius = 1.0 if component == 0 else 0.25
    assert abs(point) == pytest.approx(radius, abs=1e-8)


def test_wos_exit_rejects_outside_start(annulus):
    """A start point in the hole is not inside the domain."""
    with pytest.raises(InputError):
        sampler.wos_exit(annulus, 0.1, _config(1))


def test_erbm_path_on_disk(disk):
    """Without holes a path is a single outer hit."""
    path = sampler.erbm_path(disk, 0.3, _config(1))
    assert path.trace == (0,)
    assert not path.truncated
    assert abs(path.exit_point.as_complex()) == pytest.approx(1.0, abs=1e-8)


def test_erbm_path_from_hole_ends_outside(two_holes):
    """A path started on a hole ends on ∂A₀ with one trace entry per hit."""
    path = sampler.erbm_path(two_holes, 1, _config(1))
    assert path.trace[-1] == 0
    assert path.events == len(path.trace)
    assert path.exit_t is not None


def test_exit_distribution_is_deterministic(annulus):
    """Same seed and worker count give identical histograms."""
    config = _config(600, workers=3)
    first = sampler.estimate_exit_distribution(annulus, 0.5, 8, config)
    second = sampler.estimate_exit_distribution(annulus, 0.5, 8, config)
    assert first.distribution.counts == second.distribution.counts
    assert first.total_variation == second.total_variation


def test_exit_distribution_from_hole(annulus):
    """ERBM from the inner circle exits uniformly on the outer one."""
    paths, bins = 4000, 8
    report = sampler.estimate_exit_distribution(annulus, 1, bins, _config(paths, workers=2))
    assert report.paths == paths
    assert report.truncated == 0
    assert report.reference == pytest.approx([1 / bins] * bins, abs=1e-6)
    assert report.total_variation < max(0.02, np.sqrt(bins / paths))


def test_exit_distribution_needs_bins(disk):
    """Fewer than 8 bins is refused."""
    with pytest.raises(InputError):
        sampler.estimate_exit_distribution(disk, 0.0, 4, _config(10))


def test_small_path_counts(disk):
    """More workers than paths still gives every path once."""
    report = sampler.estimate_exit_distribution(disk, 0.0, 8, _config(3, workers=4))
    assert report.paths == 3
    assert report.distribution.total == 3


def test_chain_estimate_matches_exact(two_holes):
    """Empirical p̃ agrees with the deterministic chain within 4 standard errors."""
    estimate = sampler.estimate_chain(two_holes, _config(3000, workers=2))
    exact = erbm.boundary_chain(two_holes).p_array
    p = np.array(estimate.p_tilde)
    err = np.array(estimate.p_stderr)
    assert np.max(np.abs(p - exact) / (err + 1e-3)) < 4.0
    assert estimate.excursions == 3000


def test_chain_estimate_needs_holes(disk):
    """The disk has no chain."""
    with pytest.raises(InputError):
        sampler.estimate_chain(disk, _config(10))


def test_occupation_matches_green(disk):
    """Occupation density near 0.5 from the center is log 2/π."""
    estimate = sampler.estimate_occupation(disk, 0.0, 0.5, 0.1, _config(4000))
    assert estimate.truncated == 0
    assert abs(estimate.value - np.log(2.0) / np.pi) < 5 * estimate.stderr + 0.01


def test_total_variation():
    """½·Σ|p − q|."""
    assert sampler.total_variation([0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.5)
