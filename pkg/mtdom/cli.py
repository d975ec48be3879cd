"""Command-line interface for mtdom."""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from .config import SolverConfig
from .exceptions import DeltaRangeError, InconsistencyError, InputError, SolverError
from .export import format_summary
from .storage import (
    example_text,
    load_example,
    load_problem,
    save_problem,
    write_dot_files,
    write_report,
)
from .workflow import DecisionWorkflow

EXIT_INPUT = 1
EXIT_INCONSISTENT = 2


def _handle_errors(command):
    """Map package errors to exit codes: 1 for bad input, 2 for infeasible models."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except InputError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_INPUT)
        except (InconsistencyError, SolverError) as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_INCONSISTENT)

    return wrapper


def parse_deltas(text: Optional[str]):
    """None, "auto", or a comma-separated list of reals."""
    if text is None:
        return None
    if text.strip() == "auto":
        return "auto"
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise DeltaRangeError(f"--delta expects 'auto' or comma-separated numbers, got {text!r}")


class MtdomGroup(click.Group):
    """Click group whose usage errors exit with the input-error code.

    Click exits with 2 on a bad option or argument; here 2 is reserved for
    inconsistent models.
    """

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_INPUT
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_INPUT
            raise


def _config(epsilon_opt: Optional[float], workers: Optional[int]) -> SolverConfig:
    return SolverConfig.from_env().with_overrides(
        optimality_tolerance=epsilon_opt, workers=workers
    )


@click.group(cls=MtdomGroup)
@click.version_option(package_name="mtdom")
@click.option("--verbose", "-v", is_flag=True, help="Log solver progress to stderr.")
def cli(verbose):
    """Dominance checks for multi-target decision problems."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.argument("problem", type=click.Path(dir_okay=False))
@click.option("--delta", "delta_text", help="'auto' or comma-separated granularities.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Write the JSON report here.")
@click.option("--dot", "dot_dir", type=click.Path(file_okay=False), help="Write one DOT Hasse diagram per delta here.")
@click.option("--epsilon-opt", type=float, help="Optimality tolerance for dominance verdicts.")
@click.option("--oracle", "oracle_samples", type=int, default=0, show_default=True, help="Cross-check with this many sampled utilities per delta.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the sampling oracle.")
@click.option("--workers", type=int, help="Threads for pairwise dominance checks.")
@click.option("--prune-r2", is_flag=True, help="Drop difference comparisons implied by transitivity.")
@_handle_errors
def run(
    problem,
    delta_text,
    report_path,
    dot_dir,
    epsilon_opt,
    oracle_samples,
    seed,
    workers,
    prune_r2,
):
    """Analyse PROBLEM and print the choice sets for every delta."""
    if oracle_samples < 0:
        raise InputError("--oracle must be non-negative")
    config = _config(epsilon_opt, workers)
    workflow = DecisionWorkflow(load_problem(problem), config, prune=prune_r2)
    report = workflow.run(
        deltas=parse_deltas(delta_text),
        oracle_samples=oracle_samples,
        seed=seed,
        include_dot=dot_dir is not None,
    )

    click.echo(format_summary(report))
    if report_path:
        path = write_report(report, report_path)
        click.echo(f"\nReport written to {path}")
    if dot_dir:
        paths = write_dot_files({entry.delta: entry.dot for entry in report.deltas}, dot_dir)
        click.echo(f"{len(paths)} DOT file(s) written to {Path(dot_dir)}")


@cli.command("max-delta")
@click.argument("problem", type=click.Path(dir_okay=False))
@_handle_errors
def max_delta_command(problem):
    """Print the largest granularity PROBLEM is consistent with."""
    workflow = DecisionWorkflow(load_problem(problem), SolverConfig.from_env())
    bound = workflow.delta_bound
    suffix = " (boundary)" if bound.at_boundary else ""
    click.echo(f"delta_max = {bound.value:.12g}{suffix}")
    click.echo(f"delta_med = {bound.admissible / 2:.12g}")


@cli.command()
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write to a file instead of stdout.")
@_handle_errors
def example(output):
    """Print the bundled algorithm-comparison problem."""
    if output:
        path = save_problem(load_example(), output)
        click.echo(f"Example written to {path}")
    else:
        click.echo(example_text(), nl=False)


if __name__ == "__main__":
    cli()
