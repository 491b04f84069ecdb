"""Vectorized walk-on-spheres and ERBM path batches."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from src.core.errors import MaxStepsExceeded
from src.modules.erbm.restart import RestartDensity
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass
class OccupationTally:
    """Per-path occupation of the disk |y − center| < radius.

    Each walk-on-spheres step from x with radius r adds r²/2 (the expected
    exit time of that disk) when a point drawn from the disk's Green density
    lands in the target.
    """

    center: complex
    radius: float
    totals: np.ndarray

    def add(self, owners: np.ndarray, x: np.ndarray, r: np.ndarray, rng: np.random.Generator) -> None:
        u = rng.random((2, x.size))
        angle = rng.uniform(0.0, TWO_PI, x.size)
        y = x + r * np.sqrt(u[0] * u[1]) * np.exp(1j * angle)
        hit = np.abs(y - self.center) < self.radius
        np.add.at(self.totals, owners[hit], 0.5 * r[hit] ** 2)


@dataclass
class ExitBatch:
    """Exit positions of a batch of walkers."""

    points: np.ndarray
    components: np.ndarray
    parameters: np.ndarray
    steps: np.ndarray


class Walker:
    """Walk-on-spheres on one domain with capture distance ``epsilon``·diameter."""

    def __init__(self, domain: Domain, epsilon: float, max_steps: int):
        self.domain = domain
        self.locator = geometry.boundary_locator(domain)
        self.capture = epsilon * geometry.diameter(domain)
        self.max_steps = max_steps

    def exit(
        self,
        z: np.ndarray,
        rng: np.random.Generator,
        tally: Optional[OccupationTally] = None,
        owners: Optional[np.ndarray] = None,
    ) -> ExitBatch:
        """Jump to uniform points on maximal inscribed circles until within capture distance.

        Raises:
            MaxStepsExceeded: A walker is still inside after ``max_steps`` jumps
        """
        z = np.array(z, dtype=complex)
        m = z.size
        owners = np.arange(m) if owners is None else owners
        points = np.empty(m, dtype=complex)
        components = np.empty(m, dtype=int)
        parameters = np.empty(m)
        steps = np.zeros(m, dtype=int)
        active = np.arange(m)
        if m == 0:
            return ExitBatch(points, components, parameters, steps)
        for _ in range(self.max_steps + 1):
            distance, component, t, projection = self.locator.query(z[active])
            done = distance < self.capture
            finished = active[done]
            points[finished] = projection[done]
            components[finished] = component[done]
            parameters[finished] = t[done]
            active, radius = active[~done], distance[~done]
            if active.size == 0:
                return ExitBatch(points, components, parameters, steps)
            if tally is not None:
                tally.add(owners[active], z[active], radius, rng)
            z[active] += radius * np.exp(1j * rng.uniform(0.0, TWO_PI, active.size))
            steps[active] += 1
        raise MaxStepsExceeded(
            f"{active.size} walkers still inside after {self.max_steps} steps",
            {"walkers": int(active.size)},
        )


@dataclass
class PathBatch:
    """ERBM paths of one batch: traces, exits and truncation flags."""

    traces: List[List[int]]
    exit_t: np.ndarray
    exit_points: np.ndarray
    events: np.ndarray
    truncated: np.ndarray


def run_paths(
    walker: Walker,
    densities: Dict[int, RestartDensity],
    starts: np.ndarray,
    rng: np.random.Generator,
    max_events: int,
    hole_start: Optional[int] = None,
    tally: Optional[OccupationTally] = None,
) -> PathBatch:
    """ERBM from interior points (or from hole ``hole_start``) until ∂A₀ or ``max_events`` hits."""
    m = starts.size
    z = np.array(starts, dtype=complex)
    if hole_start is not None:
        z = densities[hole_start].sample_points(rng.random(m))
    traces: List[List[int]] = [[] for _ in range(m)]
    exit_t = np.full(m, np.nan)
    exit_points = np.full(m, np.nan + 0j)
    events = np.zeros(m, dtype=int)
    truncated = np.zeros(m, dtype=bool)
    active = np.arange(m)
    while active.size:
        batch = walker.exit(z[active], rng, tally, active)
        events[active] += 1
        for index, component in zip(active, batch.components):
            traces[index].append(int(component))
        outer = batch.components == 0
        exit_t[active[outer]] = batch.parameters[outer]
        exit_points[active[outer]] = batch.points[outer]
        rest, hit = active[~outer], batch.components[~outer]
        over = events[rest] >= max_events
        truncated[rest[over]] = True
        rest, hit = rest[~over], hit[~over]
        for i in np.unique(hit):
            chosen = rest[hit == i]
            z[chosen] = densities[int(i)].sample_points(rng.random(chosen.size))
        active = rest
    if np.any(truncated):
        logger.warning("%d of %d paths truncated at %d events", int(truncated.sum()), m, max_events)
    return PathBatch(traces, exit_t, exit_points, events, truncated)
