"""CLI Service - Command Dispatch (Public Interface).

``run(argv)`` parses one command, loads and validates the domain, delegates to
the module services and prints a Report to stdout. Grids (CSV), figures (SVG)
and the report itself are written to ``--output``.

Exit codes: 0 success, 1 computation failure or failed check, 2 usage, parse
or input error.
"""

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import settings
from src.core.errors import ComputationError, ErbmError, InputError, InvalidDomain
from src.core.log import configure_logging
from src.modules.bm_kernels import service as bm
from src.modules.bm_kernels.schemas import BoundaryPoint
from src.modules.cli import grids, svg, validation
from src.modules.cli.models import Command, ExitCode
from src.modules.cli.schemas import CheckResult, Report
from src.modules.erbm import service as erbm
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain
from src.modules.sampler import service as sampler
from src.modules.sampler.schemas import RunConfig
from src.modules.slitmap import service as slitmap
from src.modules.slitmap.models import ConjugateRole

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
MAP_TOL = 1e-5
MIN_NODES = 8
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class Context:
    """Resolved inputs of one invocation."""

    args: argparse.Namespace
    domain: Optional[Domain]
    name: str
    output: Path
    tol: float

    def file(self, suffix: str) -> Path:
        return self.output / f"{self.args.command}{suffix}"


# ============================================================================
# ARGUMENT PARSING
# ============================================================================


def _point(text: str) -> complex:
    try:
        x, y = (float(part) for part in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from e
    return complex(x, y)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", action="append", default=[], help="domain file (repeatable for validate)")
    common.add_argument("--output", default=settings.OUTPUT_DIR, help="directory for reports, grids and figures")
    common.add_argument("--nodes", type=int, default=settings.NODES, help="collocation nodes per curve")
    common.add_argument("--collar", type=float, default=settings.COLLAR, help="collar factor in (0, 1)")
    common.add_argument("--seed", type=int, default=settings.SEED)
    common.add_argument("--paths", type=int, default=settings.PATHS)
    common.add_argument("--workers", type=int, default=settings.WORKERS)
    common.add_argument("--tol", type=float, default=None, help="tolerance for deterministic checks")
    common.add_argument("--no-timestamp", action="store_true", help="omit timing lines")
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, default=settings.LOG_LEVEL.upper())
    common.add_argument("--z", type=_point, default=None, help="interior point 'x,y'")
    common.add_argument("--w", type=float, default=None, help="parameter t of a point on the outer curve")
    common.add_argument("--hole", type=int, default=None, help="hole index i ≥ 1")
    common.add_argument("--level", type=float, default=None, help="level r > 0")
    common.add_argument("--bins", type=int, default=16)

    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description="Excursion-reflected Brownian motion toolkit")
    commands = parser.add_subparsers(dest="command", required=True)
    for command in Command:
        commands.add_parser(command.value, parents=[common])
    return parser


def _require(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    command = Command(args.command)
    if command is not Command.VALIDATE and len(args.domain) != 1:
        parser.error(f"{command.value} needs exactly one --domain")
    needs = {
        Command.PK: ("z",),
        Command.GREEN: ("z",),
        Command.MAP_RADIAL: ("z",),
        Command.TRACE: ("level",),
    }
    for flag in needs.get(command, ()):
        if getattr(args, flag) is None:
            parser.error(f"{command.value} needs --{flag}")
    if command in (Command.ER_GREEN, Command.SAMPLE) and args.z is None and args.hole is None:
        parser.error(f"{command.value} needs --z or --hole")
    if not 0.0 < args.collar < 1.0:
        parser.error(f"--collar must lie in (0, 1), got {args.collar}")
    for flag, low in (("nodes", MIN_NODES), ("paths", 1), ("workers", 1), ("seed", 0)):
        if getattr(args, flag) < low:
            parser.error(f"--{flag} must be at least {low}, got {getattr(args, flag)}")


# ============================================================================
# DOMAINS
# ============================================================================


def resolve_domain_path(text: str) -> Path:
    """Path as given, else relative to the directory holding ``bundled/``."""
    path = Path(text)
    if path.exists():
        return path.resolve()
    fallback = validation.BUNDLED_DIR.parent / path
    return fallback.resolve() if fallback.exists() else path


def load_checked_domain(path: Path, nodes: int) -> Domain:
    """Load a domain file and reject invalid domains with the offending lines.

    Raises:
        DomainParseError: Malformed file
        InvalidDomain: One line per violated invariant, naming the issue and lines
    """
    domain, lines = geometry.load_domain(path, nodes)
    report = geometry.validate_domain(domain)
    if not report.valid:
        messages = []
        for item in report.issues:
            where = ", ".join(str(lines[c]) for c in item.components if c in lines)
            messages.append(f"{path}: line(s) {where}: {item.issue.value}: {item.message}")
        raise InvalidDomain("\n".join(messages), {"issues": report.codes()})
    return domain


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(seed=args.seed, path_count=args.paths, worker_count=args.workers)


def _outer(t: Optional[float]) -> BoundaryPoint:
    return BoundaryPoint(component=0, t=0.0 if t is None else t)


def _flux_check(report: Report, ctx: Context, residuals: np.ndarray) -> None:
    value = float(np.max(np.abs(residuals))) if residuals.size else 0.0
    report.bound("erbm", "flux_residual", value, ctx.tol)


def _echo_common(report: Report, ctx: Context) -> None:
    report.text("tool", f"{settings.APP_NAME} {settings.APP_VERSION}")
    report.text("domain", ctx.name)
    report.echo("nodes", ctx.args.nodes)
    report.echo("collar", ctx.args.collar)
    if ctx.domain is not None:
        report.echo("holes", ctx.domain.n)
    for flag in ("z", "w", "hole", "level"):
        value = getattr(ctx.args, flag)
        if value is not None:
            if isinstance(value, complex):
                report.text(flag, f"{value.real:.12g},{value.imag:.12g}")
            else:
                report.echo(flag, value)


# ============================================================================
# KERNEL COMMANDS
# ============================================================================


def _pk(ctx: Context, report: Report) -> None:
    domain, z, w = ctx.domain, ctx.args.z, _outer(ctx.args.w)
    report.value("poisson_kernel", bm.poisson_kernel(domain, z, w), ctx.tol)
    measures = [bm.harmonic_measure(domain, z, k) for k in range(domain.n + 1)]
    report.vector("harmonic_measures", measures, ctx.tol)
    report.value("condition", bm.condition_number(domain), ctx.tol)
    grids.write_field(bm.poisson_kernel_field(domain, w), domain, ctx.file(".csv"))
    svg.write_domain(domain, ctx.file(".svg"))


def _er_pk(ctx: Context, report: Report) -> None:
    domain = ctx.domain
    field = erbm.er_poisson_kernel(domain, _outer(ctx.args.w), ctx.args.collar)
    if ctx.args.z is not None:
        report.value("er_poisson_kernel", float(field.value([ctx.args.z])[0]), ctx.tol)
    report.vector("constants", field.constants, ctx.tol)
    report.value("condition", field.condition, ctx.tol)
    _flux_check(report, ctx, erbm.flux_residuals(field, domain, ctx.args.collar))
    grids.write_field(field, domain, ctx.file(".csv"))
    svg.write_domain(domain, ctx.file(".svg"))


def _green(ctx: Context, report: Report) -> None:
    domain, z = ctx.domain, ctx.args.z
    field = bm.greens_function(domain, z)
    report.value("robin", float(field.corrector.value([z])[0]), ctx.tol)
    probes = validation.probe_points(domain, 3, seed=ctx.args.seed)
    residual = max(
        abs(float(field.value([p])[0]) - float(bm.greens_function(domain, p).value([z])[0])) for p in probes
    )
    report.bound("bm_kernels", "green_symmetry", residual, ctx.tol)
    grids.write_field(field, domain, ctx.file(".csv"))
    svg.write_domain(domain, ctx.file(".svg"))


def _er_green_field(ctx: Context):
    if ctx.args.z is not None:
        return erbm.er_green(ctx.domain, ctx.args.z, ctx.args.collar)
    return erbm.er_green_component(ctx.domain, ctx.args.hole, ctx.args.collar)


def _er_green(ctx: Context, report: Report) -> None:
    domain = ctx.domain
    field = _er_green_field(ctx)
    report.vector("constants", field.constants, ctx.tol)
    report.value("condition", field.condition, ctx.tol)
    expected = np.zeros(domain.n)
    if field.hole is not None:
        expected[field.hole - 1] = erbm.SOURCE_FLUX
    residuals = erbm.flux_residuals(field.regular, domain, ctx.args.collar) - expected
    _flux_check(report, ctx, residuals)
    grids.write_field(field, domain, ctx.file(".csv"))
    svg.write_domain(domain, ctx.file(".svg"))


def _chain(ctx: Context, report: Report) -> None:
    chain = erbm.boundary_chain(ctx.domain, ctx.args.collar)
    fundamentals = erbm.chain_fundamentals(chain)
    report.matrix("q", chain.q_array, ctx.tol)
    report.matrix("p_tilde", chain.p_array, ctx.tol)
    report.matrix("expected_visits", fundamentals.expected_visits, ctx.tol)
    report.vector("absorption", fundamentals.absorption, ctx.tol)
    report.value("spectral_radius", fundamentals.spectral_radius, ctx.tol)
    row_error = chain.row_sum_deviation
    report.bound("erbm", "chain_row_sum", row_error, ctx.tol)


# ============================================================================
# MAP COMMANDS
# ============================================================================


def _map_chordal(ctx: Context, report: Report) -> None:
    map_field, image = slitmap.chordal_map(ctx.domain, _outer(ctx.args.w), ctx.args.collar)
    for slit in image.slits:
        prefix = f"slit.{slit.hole_index}"
        report.value(f"{prefix}.height", slit.height, MAP_TOL)
        report.value(f"{prefix}.x_min", slit.x_min, MAP_TOL)
        report.value(f"{prefix}.x_max", slit.x_max, MAP_TOL)
        report.value(f"{prefix}.aspect", slit.aspect, MAP_TOL)
        report.bound("slitmap", f"flatness_{slit.hole_index}", slit.flatness, ctx.tol)
    injective = float(image.injective)
    report.check(
        CheckResult(suite="slitmap", name="injective", value=injective, tolerance=1.0, passed=image.injective)
    )
    grids.write_map(map_field, ctx.file(".csv"))
    svg.write_domain(ctx.domain, ctx.file(".svg"))
    svg.write_chordal(image, ctx.file(".image.svg"))


def _arcs(report: Report, arcs) -> None:
    for arc in arcs:
        prefix = f"arc.{arc.hole_index}"
        report.value(f"{prefix}.radius", arc.radius, MAP_TOL)
        report.value(f"{prefix}.angle_min", arc.angle_min, MAP_TOL)
        report.value(f"{prefix}.angle_max", arc.angle_max, MAP_TOL)
        report.value(f"{prefix}.radial_deviation", arc.radial_deviation, MAP_TOL)


def _boundary_check(ctx: Context, report: Report, map_field) -> None:
    error = slitmap.boundary_correspondence(map_field)
    report.bound("slitmap", "unit_circle", error, MAP_TOL)


def _map_bilateral(ctx: Context, report: Report) -> None:
    i = 1 if ctx.args.hole is None else ctx.args.hole
    map_field, image = slitmap.bilateral_map(ctx.domain, i, ctx.args.collar)
    report.value("inner_radius", image.inner_radius, MAP_TOL)
    _arcs(report, image.arcs)
    period = slitmap.conjugate_period(map_field.field, ctx.domain, i, ConjugateRole.REAL, ctx.args.collar)
    error = abs(period + 2.0 * np.pi)
    report.value("conjugate_period", period, 1e-4)
    report.bound("slitmap", "conjugate_period", error, 1e-4)
    _boundary_check(ctx, report, map_field)
    grids.write_map(map_field, ctx.file(".csv"))
    svg.write_domain(ctx.domain, ctx.file(".svg"))
    svg.write_circular(image, ctx.file(".image.svg"))


def _map_radial(ctx: Context, report: Report) -> None:
    map_field, image = slitmap.radial_map(ctx.domain, ctx.args.z, ctx.args.collar)
    _arcs(report, image.arcs)
    _boundary_check(ctx, report, map_field)
    grids.write_map(map_field, ctx.file(".csv"))
    svg.write_domain(ctx.domain, ctx.file(".svg"))
    svg.write_circular(image, ctx.file(".image.svg"))


def _trace(ctx: Context, report: Report) -> None:
    domain = ctx.domain
    if ctx.args.w is not None:
        field = erbm.er_poisson_kernel(domain, _outer(ctx.args.w), ctx.args.collar)
    elif ctx.args.z is not None or ctx.args.hole is not None:
        field = _er_green_field(ctx)
    else:
        raise InputError("trace needs --w, --z or --hole to choose the field")
    curve = slitmap.trace_level_curve(field, ctx.args.level)
    scale = geometry.diameter(domain)
    report.echo("points", len(curve.points))
    report.value("closure_gap", curve.closure_gap, ctx.tol * scale)
    report.text("simple", "true" if curve.simple else "false")
    if curve.through_pole is not None:
        report.text("through_pole", f"{curve.through_pole.re:.12g},{curve.through_pole.im:.12g}")
    wrong = slitmap.separation_check(field, curve, seed=ctx.args.seed)
    report.check(CheckResult(suite="slitmap", name="separation", value=wrong, tolerance=0.0, passed=wrong == 0))
    closed = curve.closure_gap <= ctx.tol * scale
    report.check(
        CheckResult(suite="slitmap", name="closure", value=curve.closure_gap / scale, tolerance=ctx.tol, passed=closed)
    )
    points = curve.array
    ctx.output.mkdir(parents=True, exist_ok=True)
    columns = np.column_stack([points.real, points.imag])
    np.savetxt(ctx.file(".csv"), columns, delimiter=",", header="x,y", comments="", fmt="%.12g")
    svg.write_domain(domain, ctx.file(".svg"), [curve])


# ============================================================================
# SAMPLING AND VALIDATION
# ============================================================================


def _sample(ctx: Context, report: Report) -> None:
    domain, config = ctx.domain, _config(ctx.args)
    start = ctx.args.z if ctx.args.z is not None else ctx.args.hole
    report.echo("seed", config.seed)
    report.echo("paths", config.path_count)
    report.echo("workers", config.worker_count)
    result = sampler.estimate_exit_distribution(domain, start, ctx.args.bins, config, ctx.args.collar)
    frequencies = np.array(result.distribution.frequencies)
    stderr = np.sqrt(frequencies * (1.0 - frequencies) / max(result.distribution.total, 1))
    report.matrix("exit_frequencies", [frequencies], stderr=[stderr])
    report.vector("exit_reference", result.reference, ctx.tol)
    report.echo("truncated", result.truncated)
    bound = max(validation.TV_BOUND, float(np.sqrt(ctx.args.bins / config.path_count)))
    report.bound("sampler", "exit_total_variation", result.total_variation, bound)
    if domain.n:
        estimate = sampler.estimate_chain(domain, config, ctx.args.collar)
        exact = erbm.boundary_chain(domain, ctx.args.collar).p_array
        report.matrix("p_tilde_estimate", estimate.p_tilde, stderr=estimate.p_stderr)
        report.matrix("p_tilde_exact", exact, ctx.tol)
        spread = np.array(estimate.p_stderr) + validation.CHAIN_FLOOR
        sigmas = float(np.max(np.abs(np.array(estimate.p_tilde) - exact) / spread))
        report.bound("sampler", "chain_sigmas", sigmas, validation.CHAIN_SIGMAS)


def _validate(ctx: Context, report: Report) -> None:
    paths = [resolve_domain_path(d) for d in ctx.args.domain] or [
        validation.BUNDLED_DIR / f"{name}.dom" for name in validation.BUNDLED
    ]
    config = _config(ctx.args)
    domains: List[Tuple[str, Domain]] = [(p.stem, load_checked_domain(p, ctx.args.nodes)) for p in paths]
    rows = []
    for name, domain in domains:
        logger.info("validating %s", name)
        results = validation.run_suites(domain, config, ctx.args.bins, ctx.args.tol)
        for result in results:
            report.check(result.model_copy(update={"suite": f"{name}.{result.suite}"}))
        rows.append((name, validation.matrix_row(results)))
    for name, row in rows:
        report.text(f"matrix.{name}", row)


HANDLERS: Dict[Command, Callable[[Context, Report], None]] = {
    Command.PK: _pk,
    Command.ER_PK: _er_pk,
    Command.GREEN: _green,
    Command.ER_GREEN: _er_green,
    Command.CHAIN: _chain,
    Command.MAP_CHORDAL: _map_chordal,
    Command.MAP_BILATERAL: _map_bilateral,
    Command.MAP_RADIAL: _map_radial,
    Command.TRACE: _trace,
    Command.SAMPLE: _sample,
    Command.VALIDATE: _validate,
}


# ============================================================================
# ENTRY POINT
# ============================================================================


def _diagnose(error: ErbmError) -> None:
    print(f"error: {error}", file=sys.stderr)
    for key, value in sorted(error.details.items()):
        print(f"  {key} = {value}", file=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one command.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        int: 0 success, 1 computation failure or failed check, 2 usage/parse/input error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _require(parser, args)
    except SystemExit as e:
        return int(e.code or 0)
    configure_logging(args.log_level)
    command = Command(args.command)
    started = time.perf_counter()
    report = Report(command=command.value)
    try:
        domain, name = None, "bundled"
        if command is not Command.VALIDATE:
            path = resolve_domain_path(args.domain[0])
            domain, name = load_checked_domain(path, args.nodes), str(args.domain[0])
        ctx = Context(
            args=args,
            domain=domain,
            name=name,
            output=Path(args.output).resolve(),
            tol=args.tol or DEFAULT_TOL,
        )
        _echo_common(report, ctx)
        HANDLERS[command](ctx, report)
    except InputError as e:
        _diagnose(e)
        return ExitCode.USAGE
    except ComputationError as e:
        _diagnose(e)
        return ExitCode.COMPUTATION

    report.timing("timestamp", datetime.now(timezone.utc).isoformat(timespec="seconds"))
    report.timing("elapsed", f"{time.perf_counter() - started:.3f}", "seconds")
    timestamps = not args.no_timestamp
    sys.stdout.write(report.render(timestamps))
    report.write(ctx.output, timestamps)
    if not report.passed:
        logger.warning("%d checks failed", sum(not c.passed for c in report.checks))
        return ExitCode.COMPUTATION
    return ExitCode.SUCCESS
