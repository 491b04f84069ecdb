"""Sampler Service - Monte Carlo ERBM (Public Interface).

This is the PUBLIC INTERFACE of the sampler module. Other modules must ONLY
import from this file (and schemas.py for types).

Brownian transport is walk-on-spheres to within ε·diameter of ∂D; after a hole
hit the path restarts on that hole's collar from its restart density. Paths are
split into contiguous blocks, one Philox stream per worker, merged in worker
order.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import chisquare

from src.core.errors import InputError
from src.modules.bm_kernels import service as bm
from src.modules.bm_kernels.schemas import BoundaryArc
from src.modules.erbm import service as erbm
from src.modules.erbm.schemas import as_matrix
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain, PlanePoint
from src.modules.sampler.schemas import (
    ChainEstimate,
    EmpiricalDistribution,
    ExitReport,
    OccupationEstimate,
    RunConfig,
    TrajectorySummary,
)
from src.modules.sampler.streams import run_workers, worker_stream
from src.modules.sampler.walker import OccupationTally, Walker, run_paths

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
MIN_BINS = 8

Start = Union[int, complex, PlanePoint]


def _config(config: Optional[RunConfig]) -> RunConfig:
    return config or RunConfig()


def _interior(domain: Domain, z) -> complex:
    z = z.as_complex() if isinstance(z, PlanePoint) else complex(z)
    if not bool(geometry.contains(domain, [z])[0]):
        raise InputError(f"start point {z} is not inside the domain")
    return z


def _densities(domain: Domain, factor: Optional[float]) -> dict:
    return {i: erbm.restart_density(domain, i, factor) for i in range(1, domain.n + 1)}


def _start(domain: Domain, start: Start) -> Tuple[complex, Optional[int]]:
    if isinstance(start, (int, np.integer)):
        if not 1 <= start <= domain.n:
            raise InputError(f"hole index {start} out of range 1..{domain.n}")
        return 0j, int(start)
    return _interior(domain, start), None


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    """½·Σ|p − q|."""
    return float(0.5 * np.sum(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))))


def uniformity_pvalue(counts: Sequence[int]) -> float:
    """Chi-square p-value of ``counts`` against equal bin probabilities."""
    return float(chisquare(np.asarray(counts, dtype=float)).pvalue)


# ============================================================================
# SINGLE WALKS
# ============================================================================


def sample_exits(
    domain: Domain, points, config: Optional[RunConfig] = None, rng: Optional[np.random.Generator] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Walk-on-spheres exits for many start points.

    Returns:
        tuple: (exit points, component indices, curve parameters)

    Raises:
        MaxStepsExceeded: A walk needs more than config.max_steps jumps
    """
    config = _config(config)
    rng = rng or worker_stream(config.seed, 0)
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    geometry.require_valid(domain)
    walker = Walker(domain, config.epsilon, config.max_steps)
    batch = walker.exit(points, rng)
    return batch.points, batch.components, batch.parameters


def wos_exit(
    domain: Domain, z, config: Optional[RunConfig] = None, rng: Optional[np.random.Generator] = None
) -> Tuple[complex, int]:
    """One walk-on-spheres exit from ``z``: (nearest-boundary projection, component).

    Raises:
        InputError: z not inside the domain
        MaxStepsExceeded: Too many jumps
    """
    z = _interior(domain, z)
    points, components, _ = sample_exits(domain, [z], config, rng)
    return complex(points[0]), int(components[0])


def erbm_path(
    domain: Domain,
    start: Start,
    config: Optional[RunConfig] = None,
    rng: Optional[np.random.Generator] = None,
    factor: Optional[float] = None,
) -> TrajectorySummary:
    """One ERBM path from an interior point or from hole ``start`` (int)."""
    config = _config(config)
    rng = rng or worker_stream(config.seed, 0)
    z, hole = _start(domain, start)
    geometry.require_valid(domain)
    walker = Walker(domain, config.epsilon, config.max_steps)
    batch = run_paths(walker, _densities(domain, factor), np.array([z]), rng, config.max_events, hole)
    done = not bool(batch.truncated[0])
    return TrajectorySummary(
        trace=tuple(batch.traces[0]),
        exit_t=float(batch.exit_t[0]) if done else None,
        exit_point=PlanePoint.from_complex(batch.exit_points[0]) if done else None,
        events=int(batch.events[0]),
        truncated=not done,
    )


def sample_paths(
    domain: Domain, start: Start, config: Optional[RunConfig] = None, factor: Optional[float] = None
) -> list:
    """config.path_count ERBM paths across config.worker_count workers.

    Returns:
        list: PathBatch per worker, in worker order
    """
    config = _config(config)
    z, hole = _start(domain, start)
    geometry.require_valid(domain)
    walker = Walker(domain, config.epsilon, config.max_steps)
    densities = _densities(domain, factor)

    def task(worker: int, count: int, rng: np.random.Generator):
        logger.info("worker %d: %d paths", worker, count)
        return run_paths(walker, densities, np.full(count, z), rng, config.max_events, hole)

    return run_workers(task, config.seed, config.path_count, config.worker_count)


# ============================================================================
# ESTIMATORS
# ============================================================================


def _reference_masses(domain: Domain, start: Start, edges: np.ndarray, factor: Optional[float]) -> np.ndarray:
    arcs = [BoundaryArc(component=0, t0=float(a), t1=float(b)) for a, b in zip(edges[:-1], edges[1:])]
    if domain.n == 0:
        z = start.as_complex() if isinstance(start, PlanePoint) else complex(start)
        return np.array([bm.harmonic_measure(domain, z, arc) for arc in arcs])
    return np.array([erbm.er_harmonic_measure(domain, start, arc, factor) for arc in arcs])


def estimate_exit_distribution(
    domain: Domain,
    start: Start,
    bins: int = 16,
    config: Optional[RunConfig] = None,
    factor: Optional[float] = None,
) -> ExitReport:
    """Histogram of ERBM exit parameters on ∂A₀ and its TV distance to the ER harmonic measure.

    Raises:
        InputError: Fewer than 8 bins
    """
    if bins < MIN_BINS:
        raise InputError(f"need at least {MIN_BINS} bins, got {bins}")
    config = _config(config)
    batches = sample_paths(domain, start, config, factor)
    exit_t = np.concatenate([b.exit_t for b in batches])
    truncated = int(sum(int(b.truncated.sum()) for b in batches))
    finished = exit_t[np.isfinite(exit_t)]
    edges = np.linspace(0.0, TWO_PI, bins + 1)
    counts, _ = np.histogram(np.mod(finished, TWO_PI), bins=edges)
    distribution = EmpiricalDistribution(
        edges=tuple(float(e) for e in edges), counts=tuple(int(c) for c in counts), total=int(counts.sum())
    )
    reference = _reference_masses(domain, start, edges, factor)
    tv = total_variation(distribution.frequencies, reference)
    logger.info("exit distribution: %d paths, TV %.4f, %d truncated", exit_t.size, tv, truncated)
    return ExitReport(
        distribution=distribution,
        reference=tuple(float(r) for r in reference),
        total_variation=tv,
        truncated=truncated,
        paths=int(exit_t.size),
    )


def estimate_chain(domain: Domain, config: Optional[RunConfig] = None, factor: Optional[float] = None) -> ChainEstimate:
    """Empirical component-hit chain from config.path_count excursions per hole.

    Each excursion restarts on collar η_i and walks to the first boundary hit.

    Raises:
        InputError: Domain without holes
    """
    if domain.n == 0:
        raise InputError("the boundary chain needs at least one hole")
    config = _config(config)
    geometry.require_valid(domain)
    walker = Walker(domain, config.epsilon, config.max_steps)
    densities = _densities(domain, factor)
    n = domain.n

    def task(worker: int, count: int, rng: np.random.Generator) -> np.ndarray:
        counts = np.zeros((n, n + 1), dtype=int)
        for i in range(1, n + 1):
            z = densities[i].sample_points(rng.random(count))
            batch = walker.exit(z, rng)
            counts[i - 1] += np.bincount(batch.components, minlength=n + 1)
        return counts

    counts = sum(run_workers(task, config.seed, config.path_count, config.worker_count))
    excursions = config.path_count
    q = counts / excursions
    q_err = np.sqrt(q * (1.0 - q) / excursions)
    p = np.zeros_like(q)
    p_err = np.zeros_like(q)
    for i in range(1, n + 1):
        others = excursions - counts[i - 1, i]
        if others > 0:
            p[i - 1] = counts[i - 1] / others
            p[i - 1, i] = 0.0
            p_err[i - 1] = np.sqrt(p[i - 1] * (1.0 - p[i - 1]) / others)
    logger.info("chain estimate from %d excursions per hole", excursions)
    return ChainEstimate(
        q=as_matrix(q),
        p_tilde=as_matrix(p),
        q_stderr=as_matrix(q_err),
        p_stderr=as_matrix(p_err),
        excursions=excursions,
    )


def estimate_occupation(
    domain: Domain,
    start: Start,
    target,
    radius: float,
    config: Optional[RunConfig] = None,
    factor: Optional[float] = None,
) -> OccupationEstimate:
    """Mean ERBM occupation density over the disk |y − target| < radius.

    Compares with the average of G^{ER}(start, ·) over that disk; the estimator
    carries an O(ε) bias from the capture layer.
    """
    config = _config(config)
    z, hole = _start(domain, start)
    target = _interior(domain, target)
    geometry.require_valid(domain)
    walker = Walker(domain, config.epsilon, config.max_steps)
    densities = _densities(domain, factor)
    area = np.pi * radius**2

    def task(worker: int, count: int, rng: np.random.Generator):
        tally = OccupationTally(target, radius, np.zeros(count))
        batch = run_paths(walker, densities, np.full(count, z), rng, config.max_events, hole, tally)
        return tally.totals / area, int(batch.truncated.sum())

    results = run_workers(task, config.seed, config.path_count, config.worker_count)
    samples = np.concatenate([r[0] for r in results])
    truncated = sum(r[1] for r in results)
    value = float(samples.mean())
    stderr = float(samples.std(ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else float("inf")
    logger.info("occupation near %s: %.6f ± %.6f", target, value, stderr)
    return OccupationEstimate(value=value, stderr=stderr, paths=int(samples.size), truncated=truncated)
