"""
Command-line application for Elliptica.

Commands:
- check: run identity checks and emit a JSON or CSV suite report
- pvi: integrate Painleve VI and monitor the monodromy residual
- table: tabulate phi, E1, E2 and wp on a grid
- list: list the registered identity checks

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 numerical halt.
"""

import dataclasses
import logging
import math
import sys
import time
from pathlib import Path
from typing import List, Optional

import orjson
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from .. import __version__
from ..core.config import config
from ..core.exceptions import DataValidationError, DomainError, IntegrationHalt, SamplingError
from ..services import registry, run_suite
from ..services.elliptic import check_tau
from ..services.painleve import PainleveIntegrator, PVIConstants, PVIState
from ..services.reporting import (
    RunConfig,
    build_suite_report,
    cell_grid,
    function_table,
    gnuplot_hint,
    report_bytes,
    suite_frame,
    to_csv,
    trajectory_frame,
    write_report,
)

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_HALT = 3


def _console() -> Console:
    # stdout carries reports and CSV; human-readable output goes to stderr
    return Console(stderr=True)


def _parse_complex(raw: str, option: str) -> complex:
    try:
        return complex(raw.strip().replace(" ", ""))
    except ValueError:
        raise typer.BadParameter(f"'{raw}' is not a complex number (use e.g. 0.8j or 0.5+0.9j)", param_hint=option)


def _parse_complex_list(raw: Optional[str], option: str) -> Optional[List[complex]]:
    if raw is None:
        return None
    return [_parse_complex(item, option) for item in raw.split(",") if item.strip()]


def _parse_int_list(raw: Optional[str], option: str) -> Optional[List[int]]:
    if raw is None:
        return None
    try:
        return [int(item) for item in raw.split(",") if item.strip()]
    except ValueError:
        raise typer.BadParameter(f"'{raw}' is not a comma separated list of integers", param_hint=option)


def _parse_ids(raw: Optional[str]) -> Optional[List[str]]:
    if raw is None:
        return None
    ids = [item.strip() for item in raw.split(",") if item.strip()]
    for check_id in ids:
        if check_id not in registry:
            raise typer.BadParameter(f"Unknown identity check id: '{check_id}'", param_hint="--ids")
    return ids


def _parse_tolerances(items: List[str]) -> dict:
    tolerances = {}
    for item in items:
        check_id, sep, value = item.partition("=")
        if not sep:
            raise typer.BadParameter(f"'{item}' is not of the form id=value", param_hint="--tolerance")
        check_id = check_id.strip()
        if check_id not in registry:
            raise typer.BadParameter(f"Unknown identity check id: '{check_id}'", param_hint="--tolerance")
        try:
            tolerances[check_id] = float(value)
        except ValueError:
            raise typer.BadParameter(f"'{value}' is not a number", param_hint="--tolerance")
    return tolerances


def _emit(text: str, output: Optional[Path]):
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()


def _summary_table(report) -> Table:
    table = Table(title=f"Elliptica {report.version}: {len(report.checks)} checks")
    table.add_column("id", no_wrap=True)
    table.add_column("samples", justify="right")
    table.add_column("max residual", justify="right")
    table.add_column("tolerance", justify="right")
    table.add_column("result")
    for check in report.checks:
        residual = "inf" if check.max_residual is None else f"{check.max_residual:.2e}"
        result = "[green]pass[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(check.id, str(check.samples_run), residual, f"{check.tolerance:.1e}", result)
    return table


def _version_callback(value: bool):
    if value:
        typer.echo(f"elliptica {__version__}")
        raise typer.Exit()


def create_app() -> typer.Typer:
    """
    Create and configure the Typer application.

    Returns:
        typer.Typer: Configured application instance
    """
    app = typer.Typer(
        name="elliptica",
        help="Elliptic functions, Baxter-Belavin R-matrices and R-matrix valued Painleve VI.",
        add_completion=False,
        no_args_is_help=True,
    )

    @app.callback()
    def main(
        version: bool = typer.Option(False, "--version", callback=_version_callback, is_eager=True,
                                     help="Print the version and exit."),
        log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR."),
    ):
        """Numerical verification toolkit."""
        if log_level:
            if log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
                raise typer.BadParameter(f"Unknown log level '{log_level}'", param_hint="--log-level")
            config.set_log_level(log_level)

    @app.command("check")
    def check(
        ids: Optional[str] = typer.Option(None, "--ids", help="Comma separated check ids (default: all)."),
        n: Optional[str] = typer.Option(None, "--n", help="Comma separated matrix sizes N."),
        seed: Optional[int] = typer.Option(None, "--seed", help="Sampler seed (env ELLIPTICA_SEED)."),
        count: Optional[int] = typer.Option(None, "--count", help="Samples per check."),
        tau: Optional[str] = typer.Option(None, "--tau", help="Comma separated moduli, e.g. 0.8j,0.5+0.9j."),
        tolerance: List[str] = typer.Option([], "--tolerance", help="Override as id=value; repeatable."),
        workers: Optional[int] = typer.Option(None, "--workers", help="Worker threads (-1 = all cores)."),
        pole_guard: Optional[float] = typer.Option(None, "--pole-guard", help="Minimum lattice distance."),
        output: Optional[Path] = typer.Option(None, "--output", "-o", help="Report file (default: stdout)."),
        output_format: str = typer.Option("json", "--format", help="json or csv."),
    ):
        """Run identity checks and emit a suite report."""
        selected = _parse_ids(ids)
        try:
            run_config = RunConfig.from_config(
                "check",
                seed=seed,
                n_list=_parse_int_list(n, "--n"),
                tau_list=_parse_complex_list(tau, "--tau"),
                sample_count=count,
                tolerances=_parse_tolerances(tolerance),
                workers=workers,
                pole_guard=pole_guard,
                output_path=str(output) if output else None,
                output_format=output_format,
            )
            plan = run_config.to_plan()
        except (ValidationError, DataValidationError, DomainError) as e:
            raise typer.BadParameter(str(e))

        started = time.perf_counter()
        try:
            reports = run_suite(selected, plan, run_config.tolerances, run_config.workers)
        except SamplingError as e:
            logger.error(f"Sampling failed: {e.message}")
            raise typer.BadParameter(e.message, param_hint="--pole-guard")
        report = build_suite_report(run_config, reports, time.perf_counter() - started)

        if run_config.output_format == "csv":
            text = to_csv(suite_frame(report), str(output) if output else None)
            _emit(text, output)
        elif output:
            write_report(report, str(output))
        else:
            _emit(report_bytes(report).decode("utf-8"), None)

        _console().print(_summary_table(report))
        raise typer.Exit(EXIT_PASS if report.passed else EXIT_FAIL)

    @app.command("pvi")
    def pvi(
        n: int = typer.Option(config.painleve.n, "--n", help="Matrix size N."),
        nu: Optional[str] = typer.Option(None, "--nu", help="Four constants nu_0..nu_3, comma separated."),
        tau0: Optional[str] = typer.Option(None, "--tau0", help="Start of the path."),
        tau_end: Optional[str] = typer.Option(None, "--tau-end", help="End of the path."),
        u0: Optional[str] = typer.Option(None, "--u0", help="Initial u."),
        v0: Optional[str] = typer.Option(None, "--v0", help="Initial du/dtau."),
        hbar: Optional[str] = typer.Option(None, "--hbar", help="Spectral parameters for the residual monitor."),
        mode: str = typer.Option("analytic", "--mode", help="Residual mode: analytic or fd."),
        rtol: Optional[float] = typer.Option(None, "--rtol"),
        atol: Optional[float] = typer.Option(None, "--atol"),
        max_step: Optional[float] = typer.Option(None, "--max-step", help="Largest step in path units."),
        output: Optional[Path] = typer.Option(None, "--output", "-o", help="Trajectory CSV (default: stdout)."),
        hint: bool = typer.Option(False, "--gnuplot-hint", help="Print a gnuplot recipe for the CSV."),
    ):
        """Integrate Painleve VI and monitor the monodromy residual."""
        settings = config.painleve
        if n < 1:
            raise typer.BadParameter("N must be positive", param_hint="--n")
        if mode not in ("analytic", "fd"):
            raise typer.BadParameter(f"Unknown mode '{mode}'", param_hint="--mode")
        nu_values = _parse_complex_list(nu, "--nu") or list(settings.nu)
        if len(nu_values) != 4:
            raise typer.BadParameter("exactly four constants are required", param_hint="--nu")
        hbar_samples = _parse_complex_list(hbar, "--hbar")
        hbar_samples = list(settings.hbar_samples) if hbar_samples is None else hbar_samples

        try:
            start_tau = check_tau(_parse_complex(tau0, "--tau0") if tau0 else settings.tau0)
            end_tau = check_tau(_parse_complex(tau_end, "--tau-end") if tau_end else settings.tau_end)
            state = PVIState(
                _parse_complex(u0, "--u0") if u0 else settings.u0,
                _parse_complex(v0, "--v0") if v0 else settings.v0,
                start_tau,
            )
            integrator_settings = dataclasses.replace(
                config.integrator,
                **{key: value for key, value in (("rtol", rtol), ("atol", atol), ("max_step", max_step))
                   if value is not None},
            )
            integrator = PainleveIntegrator(integrator_settings, residual_mode=mode)
        except (DomainError, ValueError) as e:
            raise typer.BadParameter(str(e))
        constants = PVIConstants(tuple(nu_values))
        console = _console()

        exit_code = EXIT_PASS
        try:
            points = integrator.integrate(state, constants, end_tau, n, hbar_samples)
            halt = None
        except DomainError as e:
            raise typer.BadParameter(e.message, param_hint="--tau-end")
        except IntegrationHalt as e:
            points, halt = e.trajectory or [], e
            exit_code = EXIT_HALT

        text = to_csv(trajectory_frame(points, hbar_samples), str(output) if output else None)
        _emit(text, output)

        residuals = [r for point in points for r in point.residuals if not math.isnan(r)]
        worst = max(residuals) if residuals else 0.0
        threshold = settings.residual_threshold
        summary = Table(title=f"Painleve VI, N = {n}")
        summary.add_column("quantity")
        summary.add_column("value", justify="right")
        summary.add_row("points", str(len(points)))
        if points:
            end = points[-1]
            summary.add_row("tau", f"{end.tau:.6g}")
            summary.add_row("u", f"{end.u:.15g}")
            summary.add_row("v", f"{end.v:.15g}")
        summary.add_row("residual mode", mode)
        summary.add_row("max residual", f"{worst:.3e} (threshold {threshold:.1e})")
        if n % 2 == 0:
            nu_squared = constants.effective_nu_squared()
            shown = f"{nu_squared.real:.6g}" if nu_squared.imag == 0 else f"{nu_squared:.6g}"
            summary.add_row("effective single constant nu^2", shown)
        if halt is not None:
            summary.add_row("halt reason", halt.reason or "unknown")
        console.print(summary)
        if halt is not None:
            console.print(f"[red]Integration halted ({halt.reason}):[/red] {halt.message}")
        if hint:
            console.print(gnuplot_hint("pvi", str(output) if output else "trajectory.csv"), markup=False)

        if exit_code == EXIT_PASS and worst >= threshold:
            exit_code = EXIT_FAIL
        raise typer.Exit(exit_code)

    @app.command("table")
    def table(
        tau: str = typer.Option("0.8j", "--tau", help="Modulus."),
        grid: int = typer.Option(10, "--grid", help="Points per side of the fundamental-cell grid."),
        z: Optional[str] = typer.Option(None, "--z", help="Single point instead of the grid."),
        u: str = typer.Option("0.3", "--u", help="Second argument of phi."),
        pole_guard: Optional[float] = typer.Option(None, "--pole-guard", help="Flag rows closer than this."),
        output: Optional[Path] = typer.Option(None, "--output", "-o", help="CSV file (default: stdout)."),
        hint: bool = typer.Option(False, "--gnuplot-hint", help="Print a gnuplot recipe for the CSV."),
    ):
        """Tabulate phi(z, u), E1(z), E2(z) and wp(z)."""
        if grid < 1:
            raise typer.BadParameter("grid must be positive", param_hint="--grid")
        try:
            modulus = check_tau(_parse_complex(tau, "--tau"))
        except DomainError as e:
            raise typer.BadParameter(e.message, param_hint="--tau")
        points = [_parse_complex(z, "--z")] if z else cell_grid(grid, modulus)
        frame = function_table(points, _parse_complex(u, "--u"), modulus, pole_guard)
        _emit(to_csv(frame, str(output) if output else None), output)
        flagged = int(frame["pole_flag"].sum())
        _console().print(f"{len(frame)} rows, {flagged} pole-flagged")
        if hint:
            _console().print(gnuplot_hint("table", str(output) if output else "table.csv"), markup=False)
        raise typer.Exit(EXIT_PASS)

    @app.command("list")
    def list_checks(
        output_format: str = typer.Option(
            "text", "--format", help="text (a table on stderr) or json (on stdout)."
        ),
    ):
        """List the registered identity checks."""
        entries = [
            {
                "id": entry.id,
                "anchor": entry.anchor,
                "arity": list(entry.arity),
                "tolerance": entry.default_tolerance,
                "n_values": list(entry.n_values) if entry.n_values else None,
            }
            for entry in (registry.get(check_id) for check_id in registry.ids())
        ]
        if output_format == "json":
            _emit(orjson.dumps(entries, option=orjson.OPT_INDENT_2).decode("utf-8") + "\n", None)
        elif output_format == "text":
            listing = Table(title=f"{len(entries)} identity checks")
            listing.add_column("id", no_wrap=True)
            listing.add_column("tolerance", justify="right")
            listing.add_column("identity")
            for entry in entries:
                listing.add_row(entry["id"], f"{entry['tolerance']:.1e}", entry["anchor"])
            _console().print(listing)
        else:
            raise typer.BadParameter(f"Unknown format '{output_format}'", param_hint="--format")

    return app


# Global application instance
app = create_app()
