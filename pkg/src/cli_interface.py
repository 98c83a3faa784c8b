"""Command-line interface for the sparsification toolkit."""

from __future__ import annotations

import itertools
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import click
from pydantic import ValidationError
from rich.console import Console

from .config import get_settings
from .diagnostics import build_report, correlation_series, spectrum_series
from .errors import InvalidInputError, NumericFailureError
from .matrix_io import read_matrix, write_csv, write_matrix, write_pattern, write_report
from .models import TABLE_KINDS, CliInvocation, GenSpec, LpParams, Report, SparsifyParams
from .pattern import matrix_pattern
from .sparsifier import resolve_min_nonzeros, sparsify
from .spectral import factorize
from .structgen import random_member

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2

GEN_KINDS = ("cos40", "exchange", "symplectic", "cyclic_plus", "cyclic_minus") + TABLE_KINDS

SWEEP_FIELDS = ("nnz_x", "density_x", "j_min", "cond_x", "cond_pinva_x", "cond_x_pinva", "rel_inv_diff")


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4g}"


def summary_line(report: Report) -> str:
    """One-line digest with 4 significant digits."""
    return (
        f"nnz={report.nnz_x} density={_fmt(report.density_x)} j_min={_fmt(report.j_min)} "
        f"cond(X)={_fmt(report.cond_x)} cond(A+X)={_fmt(report.cond_pinva_x)} "
        f"cond(XA+)={_fmt(report.cond_x_pinva)}"
    )


def _execute(inv: CliInvocation, action: Callable[[CliInvocation], None]) -> int:
    """Run ``action`` and map toolkit errors to exit codes."""
    try:
        action(inv)
    except NumericFailureError as exc:
        logger.error(f"{inv.subcommand} failed numerically: {exc}")
        err_console.print(f"[red]numeric failure:[/red] {exc}")
        return EXIT_NUMERIC
    except (InvalidInputError, ValidationError) as exc:
        logger.error(f"{inv.subcommand} rejected its input: {exc}")
        err_console.print(f"[red]invalid input:[/red] {exc}")
        return EXIT_INVALID
    return EXIT_OK


def _write_format(inv: CliInvocation, default: str) -> str:
    return inv.format or default


def _pattern(inv: CliInvocation) -> None:
    a = read_matrix(inv.input)
    params = inv.sparsify_params()
    n_row, n_col = resolve_min_nonzeros(factorize(a, params.rank_tol), params)
    z = matrix_pattern(a, LpParams(p=params.p, q=params.q, n_row=n_row, n_col=n_col))
    write_pattern(z, inv.output)
    console.print(f"nnz={z.nnz} density={_fmt(z.nnz / (z.rows * z.cols))}")


def run_pattern(inv: CliInvocation) -> int:
    """Write the Lp pattern of the input matrix."""
    return _execute(inv, _pattern)


def _sparsify(inv: CliInvocation) -> None:
    a = read_matrix(inv.input)
    params = inv.sparsify_params()
    outcome = sparsify(a, params)
    report = build_report(a, outcome, params)
    write_matrix(outcome.x, inv.output, _write_format(inv, "coordinate"))
    if inv.pattern_out is not None:
        write_pattern(outcome.pattern, inv.pattern_out)
    if inv.report is not None:
        write_report(report, inv.report)
    console.print(summary_line(report))


def run_sparsify(inv: CliInvocation) -> int:
    """Sparsify the input; write X, optionally its pattern and the JSON report."""
    return _execute(inv, _sparsify)


def _diagnose(inv: CliInvocation) -> None:
    a = read_matrix(inv.input)
    params = inv.sparsify_params()
    outcome = sparsify(a, params)
    report = build_report(a, outcome, params)
    write_report(report, inv.report)
    if inv.output is not None:
        write_matrix(outcome.x, inv.output, _write_format(inv, "coordinate"))
    if inv.series_out is not None:
        write_csv(spectrum_series(a, outcome.x), inv.series_out)
    if inv.correlation_out is not None:
        write_csv(correlation_series(a, outcome.x), inv.correlation_out)
    console.print(summary_line(report))
    for name, ok in (
        ("clustering", report.cluster_ok),
        ("condition bound", report.cond_bound_ok),
        ("a-priori bound", report.apriori_bound_ok),
        ("misfit bound", report.misfit_bound_ok),
    ):
        status = "n/a" if ok is None else ("[green]ok[/green]" if ok else "[red]violated[/red]")
        console.print(f"  {name}: {status}")


def run_diagnose(inv: CliInvocation) -> int:
    """Sparsify the input and write the full diagnostic report and plot series."""
    return _execute(inv, _diagnose)


def _gen(inv: CliInvocation) -> None:
    spec = GenSpec(kind=inv.kind, size=inv.size, seed=inv.seed, rank_deficiency=inv.rank_deficiency)
    a = random_member(spec)
    write_matrix(a, inv.output, _write_format(inv, "dense"))
    console.print(f"{spec.kind} {spec.size}x{spec.size} written to {inv.output}")


def run_gen(inv: CliInvocation) -> int:
    """Write a generated test matrix."""
    return _execute(inv, _gen)


def sweep_rows(a, base: SparsifyParams, grid: List[Tuple[float, float]], workers: int = 1) -> List[Dict[str, object]]:
    """One row per (p, q) grid point, in grid order."""

    def point(pq: Tuple[float, float]) -> Dict[str, object]:
        params = base.model_copy(update={"p": pq[0], "q": pq[1]})
        report = build_report(a, sparsify(a, params), params)
        row: Dict[str, object] = {"p": pq[0], "q": pq[1]}
        row.update({name: getattr(report, name) for name in SWEEP_FIELDS})
        return row

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(point, grid))


def _sweep(inv: CliInvocation) -> None:
    a = read_matrix(inv.input)
    grid = list(itertools.product(inv.p_list, inv.q_list))
    workers = inv.workers if inv.workers is not None else get_settings().workers
    logger.info(f"sweep over {len(grid)} grid points with {workers} worker(s)")
    rows = sweep_rows(a, inv.sparsify_params(), grid, workers)
    write_csv(rows, inv.output)
    console.print(f"{len(rows)} grid points written to {inv.output}")


def run_sweep(inv: CliInvocation) -> int:
    """Sparsify over a (p, q) grid and write one CSV row per point."""
    return _execute(inv, _sweep)


class SparsifyGroup(click.Group):
    """Group that reports usage errors with exit code 1 and returns command exit codes."""

    def main(self, args=None, prog_name=None, **extra):
        extra.pop("standalone_mode", None)
        try:
            rv = super().main(args=args, prog_name=prog_name, standalone_mode=False, **extra)
        except click.ClickException as exc:
            exc.show()
            sys.exit(EXIT_INVALID)
        except click.Abort:
            err_console.print("[yellow]aborted[/yellow]")
            sys.exit(EXIT_INVALID)
        sys.exit(rv or EXIT_OK)


def _float_list(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}") from exc


def _invoke(subcommand: str, run: Callable[[CliInvocation], int], options: Dict[str, object]) -> int:
    try:
        inv = CliInvocation(subcommand=subcommand, **{k: v for k, v in options.items() if v is not None})
    except ValidationError as exc:
        err_console.print(f"[red]invalid arguments:[/red] {exc}")
        return EXIT_INVALID
    return run(inv)


_path = click.Path(dir_okay=False, path_type=Path)


def _io_options(func):
    for decorator in reversed(
        (
            click.option("--input", "input", type=_path, help="Input matrix (Matrix Market)"),
            click.option("--output", "output", type=_path, help="Output file"),
        )
    ):
        func = decorator(func)
    return func


def _lp_options(func):
    for decorator in reversed(
        (
            click.option("--p", "p", type=float, help="Lp exponent; 'inf' for the max modulus"),
            click.option("--q", "q", type=float, help="Retention parameter in [0, 1]"),
            click.option("--rank-tol", "rank_tol", type=float, help="Relative rank tolerance"),
            click.option("--n-row", "n_row", type=int, help="Minimum nonzeros per row"),
            click.option("--n-col", "n_col", type=int, help="Minimum nonzeros per column"),
        )
    ):
        func = decorator(func)
    return func


_format_option = click.option(
    "--format", "format", type=click.Choice(["dense", "coordinate"]), help="Matrix Market layout of written matrices"
)


@click.group(cls=SparsifyGroup)
def cli():
    """Null-space preserving matrix sparsification."""


@cli.command()
@_io_options
@_lp_options
def pattern(**options):
    """Compute the Lp sparsity pattern of a matrix."""
    return _invoke("pattern", run_pattern, options)


@cli.command(name="sparsify")
@_io_options
@_lp_options
@_format_option
@click.option("--pattern-out", "pattern_out", type=_path, help="Write the pattern used")
@click.option("--report", "report", type=_path, help="Write the JSON report")
def sparsify_command(**options):
    """Sparsify a matrix while preserving its null-spaces."""
    return _invoke("sparsify", run_sparsify, options)


@cli.command()
@_io_options
@_lp_options
@_format_option
@click.option("--report", "report", type=_path, help="Write the JSON report")
@click.option("--series-out", "series_out", type=_path, help="CSV of singular values and eigenvalues")
@click.option("--correlation-out", "correlation_out", type=_path, help="CSV of entries of A against X")
def diagnose(**options):
    """Sparsify a matrix and report every metric and bound."""
    return _invoke("diagnose", run_diagnose, options)


@cli.command()
@click.option("--kind", "kind", type=click.Choice(GEN_KINDS), help="Matrix family")
@click.option("--size", "size", type=int, help="Matrix dimension")
@click.option("--seed", "seed", type=int, help="PCG64 seed")
@click.option("--rank-deficiency", "rank_deficiency", type=int, help="Singular values to zero out")
@click.option("--output", "output", type=_path, help="Output file")
@_format_option
def gen(**options):
    """Generate a test matrix."""
    return _invoke("gen", run_gen, options)


@cli.command()
@_io_options
@_lp_options
@click.option("--p-list", "p_list", callback=_float_list, help="Comma-separated p values")
@click.option("--q-list", "q_list", callback=_float_list, help="Comma-separated q values")
@click.option("--workers", "workers", type=int, help="Threads for the grid")
def sweep(**options):
    """Sparsify over a (p, q) grid and write a CSV."""
    return _invoke("sweep", run_sweep, options)
