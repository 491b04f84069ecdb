"""Invariant suites run by ``validate``.

Each suite returns CheckResults; an exception inside a check is recorded as a
failed check carrying the error code, so one broken invariant never hides the
others.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from src.core.errors import ErbmError
from src.modules.bm_kernels import service as bm
from src.modules.cli.schemas import CheckResult
from src.modules.erbm import service as erbm
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain
from src.modules.sampler import service as sampler
from src.modules.sampler.schemas import RunConfig
from src.modules.slitmap import service as slitmap
from src.modules.slitmap.models import ConjugateRole

logger = logging.getLogger(__name__)

BUNDLED_DIR = Path(__file__).resolve().parents[3] / "bundled"
BUNDLED = ("disk", "annulus", "two_holes")
SUITES = ("geometry", "bm_kernels", "erbm", "slitmap", "sampler")

PROBE_DEPTH = 0.1
COLLAR_FACTORS = (0.4, 0.6)
TV_BOUND = 0.02
CHAIN_SIGMAS = 3.0
CHAIN_FLOOR = 1e-3
CR_TOL = 1e-5


def probe_points(domain: Domain, count: int, seed: int = 0) -> np.ndarray:
    """Interior points at least 0.1·diameter from ∂D."""
    rng = np.random.default_rng(seed)
    _, outline = geometry.sample_curve(domain.outer, 512)
    depth = PROBE_DEPTH * geometry.diameter(domain)
    chosen: List[complex] = []
    while len(chosen) < count:
        batch = rng.uniform(outline.real.min(), outline.real.max(), 8 * count) + 1j * rng.uniform(
            outline.imag.min(), outline.imag.max(), 8 * count
        )
        dist, _, _, _ = geometry.distance_to_boundary(domain, batch)
        ok = geometry.contains(domain, batch) & (dist >= depth)
        chosen.extend(batch[ok].tolist())
    return np.array(chosen[:count])


def _check(suite: str, name: str, compute: Callable[[], float], tolerance: float, below: bool = True) -> CheckResult:
    try:
        value = float(compute())
    except ErbmError as e:
        logger.warning("check %s.%s raised %s", suite, name, e)
        return CheckResult(suite=suite, name=name, value=float("nan"), tolerance=tolerance, passed=False, error=e.code)
    passed = value <= tolerance if below else value >= tolerance
    return CheckResult(suite=suite, name=name, value=value, tolerance=tolerance, passed=bool(passed))


# ============================================================================
# SUITES
# ============================================================================


def geometry_suite(domain: Domain, tol: Optional[float] = None) -> List[CheckResult]:
    def collars() -> float:
        for i in range(1, domain.n + 1):
            geometry.collar_curve(domain, i)
        return 0.0

    return [
        _check("geometry", "issues", lambda: len(geometry.validate_domain(domain).issues), 0.0),
        _check("geometry", "collars", collars, 0.0),
    ]


def bm_kernels_suite(domain: Domain, tol: Optional[float] = None) -> List[CheckResult]:
    probes = probe_points(domain, 6, seed=1)

    def measure_sum() -> float:
        total = sum(bm.component_measure(domain, k).value(probes) for k in range(domain.n + 1))
        return float(np.max(np.abs(total - 1.0)))

    def green_symmetry() -> float:
        a, b = probes[:3], probes[3:]
        return max(
            abs(float(bm.greens_function(domain, x).value([y])[0]) - float(bm.greens_function(domain, y).value([x])[0]))
            for x, y in zip(a, b)
        )

    return [
        _check("bm_kernels", "measure_sum", measure_sum, tol or 1e-8),
        _check("bm_kernels", "green_symmetry", green_symmetry, tol or 1e-6),
    ]


def erbm_suite(domain: Domain, tol: Optional[float] = None) -> List[CheckResult]:
    if domain.n == 0:
        probe = probe_points(domain, 1, seed=2)[0]

        def reduces() -> float:
            er = float(erbm.er_poisson_kernel(domain, 0.0).value([probe])[0])
            return abs(er - bm.poisson_kernel_density(domain, probe, 0, [0.0])[0])

        return [_check("erbm", "reduces_to_bm", reduces, tol or 1e-10)]

    def flux() -> float:
        return float(np.max(np.abs(erbm.flux_residuals(erbm.er_poisson_kernel(domain, 0.0), domain))))

    def chain_rows() -> float:
        return erbm.boundary_chain(domain).row_sum_deviation

    def collar_independence() -> float:
        low, high = (erbm.boundary_chain(domain, f).p_array for f in COLLAR_FACTORS)
        return float(np.max(np.abs(low - high)))

    return [
        _check("erbm", "period_asymmetry", lambda: erbm.period_matrix(domain).asymmetry, tol or 1e-6),
        _check("erbm", "period_max_eigenvalue", lambda: float(np.max(erbm.period_matrix(domain).eigenvalues)), 0.0),
        _check("erbm", "flux_residual", flux, tol or 1e-6),
        _check("erbm", "chain_row_sum", chain_rows, tol or 1e-8),
        _check("erbm", "collar_independence", collar_independence, 1e-4),
    ]


def slitmap_suite(domain: Domain, tol: Optional[float] = None) -> List[CheckResult]:
    probes = probe_points(domain, 4, seed=3)
    z0 = complex(probes[0])
    scale = geometry.diameter(domain)
    results = []

    def radial_boundary() -> float:
        map_field, _ = slitmap.radial_map(domain, z0)
        return slitmap.boundary_correspondence(map_field)

    def radial_cauchy_riemann() -> float:
        map_field, _ = slitmap.radial_map(domain, z0)
        return map_field.cauchy_riemann_residual(probes[1:])

    results.append(_check("slitmap", "radial_boundary", radial_boundary, tol or 1e-5))
    results.append(_check("slitmap", "radial_cauchy_riemann", radial_cauchy_riemann, CR_TOL))
    if domain.n:

        def bilateral_period() -> float:
            u = np.pi * erbm.er_green_component(domain, 1)
            return abs(slitmap.conjugate_period(u, domain, 1, ConjugateRole.REAL) + 2.0 * np.pi)

        results.append(_check("slitmap", "bilateral_period", bilateral_period, 1e-4))

    field = erbm.er_green(domain, z0)
    level = 0.5 * float(field.value([probes[1]])[0]) + 0.5 * float(field.value([probes[2]])[0])
    state: Dict[str, object] = {}

    def closure() -> float:
        state["curve"] = slitmap.trace_level_curve(field, level)
        return state["curve"].closure_gap / scale

    def simple() -> float:
        curve = state.get("curve") or slitmap.trace_level_curve(field, level)
        return 0.0 if curve.simple else 1.0

    def separation() -> float:
        curve = state.get("curve") or slitmap.trace_level_curve(field, level)
        return slitmap.separation_check(field, curve, probes=200)

    results.append(_check("slitmap", "level_closure", closure, tol or 1e-6))
    results.append(_check("slitmap", "level_simple", simple, 0.0))
    results.append(_check("slitmap", "level_separation", separation, 0.0))
    return results


def sampler_suite(domain: Domain, config: RunConfig, bins: int = 16, tol: Optional[float] = None) -> List[CheckResult]:
    start = complex(probe_points(domain, 1, seed=4)[0])
    tv_bound = max(TV_BOUND, float(np.sqrt(bins / config.path_count)))
    results = [
        _check(
            "sampler",
            "exit_total_variation",
            lambda: sampler.estimate_exit_distribution(domain, start, bins, config).total_variation,
            tv_bound,
        )
    ]
    if domain.n:

        def chain_sigmas() -> float:
            estimate = sampler.estimate_chain(domain, config)
            exact = erbm.boundary_chain(domain).p_array
            p = np.array(estimate.p_tilde)
            err = np.array(estimate.p_stderr)
            return float(np.max(np.abs(p - exact) / (err + CHAIN_FLOOR)))

        results.append(_check("sampler", "chain_sigmas", chain_sigmas, CHAIN_SIGMAS))
    return results


def run_suites(domain: Domain, config: RunConfig, bins: int = 16, tol: Optional[float] = None) -> List[CheckResult]:
    """Every suite on one domain, in module order."""
    results = []
    results += geometry_suite(domain, tol)
    if not results[0].passed:
        return results
    results += bm_kernels_suite(domain, tol)
    results += erbm_suite(domain, tol)
    results += slitmap_suite(domain, tol)
    results += sampler_suite(domain, config, bins, tol)
    return results


def matrix_row(results: List[CheckResult]) -> str:
    """``suite:pass`` cells for the pass/fail matrix; suites never reached are ``skip``."""
    cells = []
    for suite in SUITES:
        mine = [r for r in results if r.suite == suite]
        status = "skip" if not mine else "pass" if all(r.passed for r in mine) else "fail"
        cells.append(f"{suite}:{status}")
    return " ".join(cells)
