#!/usr/bin/env python3
"""
smpec Main Entry Point - solve and certify simple MPEC instances
"""
import asyncio
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import click
import yaml

from .__version__ import get_version_info
from .certify.report import (
    CertificationCoordinator,
    CertificationJob,
    CertificationReport,
    dump_reports,
)
from .config import DEFAULT_CONFIG_PATH, SmpecConfig, load_config
from .errors import CertificateNotMet, SmpecError
from .gap.dual_gap import eval_gap
from .instances.demos import DemoName, get_demo, materialize_demo
from .instances.schema import parse_instance
from .model.instance import ProblemInstance, validate_instance
from .model.types import plain
from .solver.extragradient import solve_vi
from .solver.regularization import SolveTrace, TraceStatus, solve_smpec

DEMO_NAMES = [d.value for d in DemoName]


def setup_logging(log_file_path=".smpec/smpec.log", debug=False, level="INFO"):
    """Setup logging with proper file path from configuration"""
    Path(log_file_path).parent.mkdir(parents=True, exist_ok=True)

    level = logging.DEBUG if debug else getattr(logging, str(level).upper(), logging.INFO)

    logging.getLogger().handlers.clear()

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(log_file_path, encoding="utf-8", errors="replace"),
        ],
    )

    root_logger = logging.getLogger()
    for handler in root_logger.handlers:
        if (
            isinstance(handler, logging.StreamHandler)
            and getattr(handler.stream, "name", None) == "<stderr>"
        ):
            # console may not handle emojis
            if hasattr(handler.stream, "reconfigure"):
                try:
                    handler.stream.reconfigure(errors="replace")
                except Exception:
                    pass


logger = logging.getLogger(__name__)


def _exit_with(error: SmpecError, what: str) -> None:
    """Report a library error and exit with its class-specific code"""
    logger.error(f"{what}: {error}")
    click.echo(f"❌ {what}: {error}", err=True)
    sys.exit(error.exit_code)


def _parse_point(ctx, param, value) -> Optional[List[float]]:
    """Comma-separated floats, e.g. --point 0.5,-1"""
    if value is None:
        return None
    try:
        return [float(v) for v in value.replace(" ", "").split(",") if v]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def _check_length(point: Optional[List[float]], inst: ProblemInstance, hint: str) -> None:
    if point is not None and len(point) != inst.dimension:
        raise click.BadParameter(
            f"expected {inst.dimension} coordinate(s) for {inst.name}, got {len(point)}",
            param_hint=hint,
        )


def _echo_yaml(data) -> None:
    click.echo(yaml.safe_dump(plain(data), sort_keys=False, default_flow_style=None).rstrip())


def _config(ctx) -> SmpecConfig:
    return ctx.obj["smpec_config"]


def _with_overrides(
    cfg: SmpecConfig,
    epsilon0=None,
    alpha=None,
    mu=None,
    max_outer=None,
    max_inner=None,
    inner_tol=None,
    box_radius=None,
    x0=None,
) -> SmpecConfig:
    """CLI flags win over file values"""
    solver = cfg.solver
    sub_changes = {
        k: v for k, v in {"max_inner": max_inner, "inner_tol": inner_tol}.items() if v is not None
    }
    solver_changes = {
        k: v
        for k, v in {
            "epsilon0": epsilon0,
            "alpha": alpha,
            "mu": mu,
            "max_outer": max_outer,
            "x0": x0,
        }.items()
        if v is not None
    }
    solver = replace(solver, subproblem=replace(solver.subproblem, **sub_changes), **solver_changes)
    instance = cfg.instance
    if box_radius is not None:
        instance = replace(instance, box_radius=box_radius)
    return replace(cfg, solver=solver, instance=instance)


def _load_instance(source: str, cfg: SmpecConfig) -> ProblemInstance:
    """An instance file path, or a demo name when no such file exists"""
    if not Path(source).exists() and source in DEMO_NAMES:
        return get_demo(source).instance()
    return parse_instance(source, box_radius=cfg.instance.box_radius)


def _demo_for(source: str):
    if not Path(source).exists() and source in DEMO_NAMES:
        return get_demo(source)
    return None


def _demo_base(source: str, cfg: SmpecConfig) -> SmpecConfig:
    """Demo solver settings layered over the file config"""
    demo = _demo_for(source)
    if demo is None:
        return cfg
    return replace(cfg, solver=demo.solve_config(cfg.solver))


def _solve_options(func):
    """Shared regularization overrides"""
    options = [
        click.option("--epsilon0", type=float, help="Initial regularization parameter"),
        click.option("--alpha", type=float, help="Decay exponent: eps_k = eps0/(k+1)^alpha"),
        click.option("--mu", type=float, help="Stop once g_D(x_k) < mu"),
        click.option("--max-outer", type=int, help="Outer iteration cap"),
        click.option("--max-inner", type=int, help="Subproblem iteration cap"),
        click.option("--box-radius", type=float, help="Radius R of the wrapping box"),
        click.option("--x0", callback=_parse_point, help="Starting point, comma-separated"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _print_summary(trace: SolveTrace, inst: ProblemInstance) -> None:
    summary = trace.summary(inst)
    icon = "✅" if trace.status == TraceStatus.THRESHOLD_MET else "⚠️"
    click.echo(f"{icon} {inst.name}: {trace.status.value} after {len(trace)} iteration(s)")
    _echo_yaml(summary)


def _print_report(report: CertificationReport) -> None:
    icon = "✅" if report.certified else "❌"
    click.echo(f"{icon} {report.instance} at {report.point.tolist()}: "
               f"{'certified' if report.certified else 'not certified'}")
    for check in report.checks:
        mark = "✓" if check.passed else "✗"
        extra = {k: v for k, v in check.metadata.items() if k != "tail_maxima"}
        click.echo(f"   {mark} {check.name} {plain(extra)}")


@click.group(invoke_without_command=True)
@click.option("--config", default=DEFAULT_CONFIG_PATH, help="Configuration file path")
@click.option("--debug", is_flag=True, help="Enable debug logging")
@click.option("--version", is_flag=True, help="Show version information")
@click.pass_context
def cli(ctx, config, debug, version):
    """smpec - minimize a convex f over the solutions of a monotone VI

    Solves min f(x) s.t. x in sol(VI(F, C)) by regularizing with the dual gap
    function and certifies candidate solutions.
    """
    if version:
        click.echo(get_version_info())
        ctx.exit()

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        return

    try:
        smpec_config = load_config(config)
    except SmpecError as e:
        click.echo(f"❌ Invalid configuration: {e}", err=True)
        sys.exit(e.exit_code)

    setup_logging(smpec_config.logging.file, debug, smpec_config.logging.level)

    if debug:
        logger.debug("🐛 Debug logging enabled")

    ctx.ensure_object(dict)
    ctx.obj["config"] = config
    ctx.obj["smpec_config"] = smpec_config


@cli.command()
@click.option("--project-dir", default=".", help="Directory to create .smpec/ in")
@click.option("--force", is_flag=True, help="Overwrite an existing config")
def init(project_dir, force):
    """Write a default configuration to .smpec/config.yaml"""
    project_path = Path(project_dir).resolve()
    smpec_dir = project_path / ".smpec"
    config_path = smpec_dir / "config.yaml"

    click.echo(f"🚀 Initializing {get_version_info()} in {project_path}")
    try:
        smpec_dir.mkdir(parents=True, exist_ok=True)
        if config_path.exists() and not force:
            click.echo(f"⚠️ {config_path} already exists (use --force to overwrite)")
            return
        with open(config_path, "w", encoding="utf-8") as f:
            f.write(_generate_default_config())
        (smpec_dir / "demos").mkdir(exist_ok=True)
        click.echo(f"📁 Config: {config_path}")
        click.echo("\n🎯 Next steps:")
        click.echo("1. Try a built-in instance: smpec demo example-3-2")
        click.echo("2. Solve your own: smpec solve my-instance.yaml --trace trace.csv")
    except OSError as e:
        click.echo(f"❌ Failed to initialize: {e}", err=True)
        sys.exit(1)


@cli.command()
@click.argument("instance")
@click.pass_context
def validate(ctx, instance):
    """Parse and validate an instance file (or demo name)"""
    cfg = _config(ctx)
    try:
        inst = _load_instance(instance, cfg)
        report = validate_instance(inst)
    except SmpecError as e:
        _exit_with(e, f"Invalid instance {instance}")
    click.echo(f"✅ {inst.name}: valid (n={inst.dimension})")
    _echo_yaml(report.to_dict())


@cli.command()
@click.argument("instance")
@click.option("--point", required=True, callback=_parse_point, help="Point x, comma-separated")
@click.option("--tol", type=float, help="Near-maximizer tolerance")
@click.pass_context
def gap(ctx, instance, point, tol):
    """Evaluate g_D at a point with its maximizers and a subgradient"""
    cfg = _config(ctx)
    gap_config = cfg.gap if tol is None else replace(cfg.gap, argmax_tol=tol)
    try:
        inst = _load_instance(instance, cfg)
        _check_length(point, inst, "--point")
        x = inst.set.require_member(point)
        ev = eval_gap(inst, x, gap_config)
    except SmpecError as e:
        _exit_with(e, "Gap evaluation failed")
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--point")
    click.echo(f"📏 g_D({x.tolist()}) = {ev.value:.10g}")
    _echo_yaml(ev.to_dict())


@cli.command()
@click.argument("instance")
@click.option("--tol", type=float, help="Stop once g_D(x) <= tol")
@click.option("--max-iter", type=int, help="Iteration cap")
@click.option("--x0", callback=_parse_point, help="Starting point, comma-separated")
@click.pass_context
def vi(ctx, instance, tol, max_iter, x0):
    """Solve the lower-level VI(F, C) with the extragradient method"""
    cfg = _config(ctx)
    vi_config = cfg.vi if max_iter is None else replace(cfg.vi, max_iter=max_iter)
    try:
        inst = _load_instance(instance, cfg)
        _check_length(x0, inst, "--x0")
        result = solve_vi(inst, tol, vi_config, x0=x0, gap_config=cfg.gap)
    except SmpecError as e:
        _exit_with(e, "VI solve failed")
    click.echo(f"✅ VI solved in {result.iterations} iteration(s), g_D = {result.residual:.3e}")
    _echo_yaml(result.to_dict())


@cli.command()
@click.argument("instance")
@_solve_options
@click.option("--tol", type=float, help="Subproblem tolerance")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Trace CSV output")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Summary YAML")
@click.pass_context
def solve(ctx, instance, epsilon0, alpha, mu, max_outer, max_inner, box_radius, x0, tol,
          trace_path, report_path):
    """Run the regularization scheme min_C f + lambda_k g_D, lambda_k = 1/eps_k"""
    cfg = _with_overrides(
        _demo_base(instance, _config(ctx)),
        epsilon0, alpha, mu, max_outer, max_inner, tol, box_radius, x0,
    )
    try:
        inst = _load_instance(instance, cfg)
        _check_length(x0, inst, "--x0")
        trace = solve_smpec(inst, cfg.solver, cfg.gap)
    except SmpecError as e:
        _exit_with(e, "Solve failed")

    if trace_path:
        trace.to_csv(trace_path)
        click.echo(f"📁 Trace: {trace_path}")
    if report_path:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        with open(report_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(plain(trace.summary(inst)), f, sort_keys=False)
        click.echo(f"📁 Summary: {report_path}")
    _print_summary(trace, inst)


@cli.command()
@click.argument("instances", nargs=-1, required=True)
@click.option("--point", callback=_parse_point,
              help="Candidate x̄ (all instances); solved for when omitted")
@click.option("--tol", type=float, help="Certificate tolerance")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Report YAML output")
@_solve_options
@click.pass_context
def certify(ctx, instances, point, tol, report_path, epsilon0, alpha, mu, max_outer, max_inner,
            box_radius, x0):
    """Run KKT, weak BCQ, multiplier and sequential checks on one or more instances"""
    base = _config(ctx)
    coordinator = CertificationCoordinator(base)
    jobs = []
    try:
        for source in instances:
            cfg = _with_overrides(
                _demo_base(source, base),
                epsilon0, alpha, mu, max_outer, max_inner, None, box_radius, x0,
            )
            inst = _load_instance(source, cfg)
            _check_length(point, inst, "--point")
            _check_length(x0, inst, "--x0")
            demo = _demo_for(source)
            job_tol = tol if tol is not None else (demo.certify_tol if demo else None)
            if point is not None:
                jobs.append(CertificationJob(inst, point, tol=job_tol))
                continue
            trace = solve_smpec(inst, cfg.solver, cfg.gap)
            jobs.append(CertificationJob(inst, trace.final_x, trace=trace, tol=job_tol))
        reports = asyncio.run(coordinator.certify_batch(jobs))
    except SmpecError as e:
        _exit_with(e, "Certification failed")

    for report in reports:
        _print_report(report)
    if report_path:
        dump_reports(reports, report_path)
        click.echo(f"📁 Report: {report_path}")

    failed = [r.instance for r in reports if not r.certified]
    if failed:
        _exit_with(CertificateNotMet(f"not certified: {', '.join(failed)}"), "Certification")


@cli.command()
@click.argument("name", type=click.Choice(DEMO_NAMES))
@click.option("--output-dir", default=".smpec/demos", help="Where instance, trace and report go")
@click.pass_context
def demo(ctx, name, output_dir):
    """Materialize a built-in instance, then solve and certify it"""
    cfg = _config(ctx)
    preset = get_demo(name)
    out = Path(output_dir)
    click.echo(f"🎬 {name}: {preset.description}")
    try:
        path = materialize_demo(name, out / f"{name}.yaml")
        inst = parse_instance(path, box_radius=cfg.instance.box_radius)
        trace = solve_smpec(inst, preset.solve_config(cfg.solver), cfg.gap)
        trace.to_csv(out / f"{name}.trace.csv")
        _print_summary(trace, inst)
        report = CertificationCoordinator(cfg).certify(
            inst, trace.final_x, trace, tol=preset.certify_tol
        )
    except SmpecError as e:
        _exit_with(e, f"Demo {name} failed")

    report.to_yaml(out / f"{name}.report.yaml")
    _print_report(report)
    click.echo(f"📁 Instance: {path}")
    click.echo(f"📁 Trace: {out / f'{name}.trace.csv'}")
    click.echo(f"📁 Report: {out / f'{name}.report.yaml'}")
    if not report.certified:
        _exit_with(CertificateNotMet(f"{name} terminal point not certified"), "Certification")


def _generate_default_config() -> str:
    """Default smpec configuration"""
    return """# smpec configuration
smpec:
  # Regularization loop: eps_k = epsilon0 / (k+1)^alpha, weight 1/eps_k on g_D
  solver:
    epsilon0: 1.0
    alpha: 1.0
    mu: 1.0e-6          # stop once g_D(x_k) < mu
    max_outer: 200
    x0: null            # null starts from the center of C
    subproblem:
      step_rule: halving   # halving | diminishing
      step0: null          # null means 0.1 * diam(C)
      max_inner: 5000
      inner_tol: 1.0e-10
      window: 100

  # Inner maximization behind g_D
  gap:
    argmax_tol: 1.0e-6
    fw_tol: 1.0e-8
    fw_max_iter: 100000
    multistart: 32      # black-box maps only
    seed: 0

  # Reference extragradient solver
  vi:
    tol: 1.0e-8
    max_iter: 100000

  certify:
    tol: 1.0e-6

  instance:
    box_radius: 1000.0  # unbounded sets are wrapped in [-R, R]^n

  logging:
    level: INFO
    file: .smpec/smpec.log
"""


if __name__ == "__main__":
    cli()
