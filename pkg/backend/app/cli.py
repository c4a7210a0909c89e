"""Command-line entry point: ``python -m app`` (or ``lasbench``)."""
from __future__ import annotations

import json
import logging
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import click
import numpy as np
from pydantic import ValidationError

from . import registry
from .exceptions import ConfigurationError, InstanceParseError
from .harness import calibrate_cutoff, load_experiment_spec, load_problem, problem_kind_of, run_experiment
from .qap import QapInstance, serialize_qaplib
from .reporting import export_trace, write_atomic, write_results, write_traces
from .schemas import ExperimentResult, ProblemKind, StepCounting, StrategyConfig, StrategyKind, Termination
from .search import DEFAULT_TRACE_PERIOD, TraceRecorder, run_search
from .tsp import TspInstance, serialize_tsplib

logger = logging.getLogger(__name__)

_KINDS = click.Choice([kind.value for kind in ProblemKind])
_STRATEGIES = click.Choice([kind.value for kind in StrategyKind])
_COUNTING = click.Choice([counting.value for counting in StepCounting])


@contextmanager
def _translate_errors() -> Iterator[None]:
    """Library exceptions to click errors: usage problems exit 2, everything else 1."""
    try:
        yield
    except FileNotFoundError as exc:
        raise click.ClickException(f"cannot open {exc.filename}: {exc.strerror}") from exc
    except InstanceParseError as exc:
        raise click.ClickException(str(exc)) from exc
    except ValidationError as exc:
        raise click.UsageError(_validation_message(exc)) from exc
    except ConfigurationError as exc:
        raise click.UsageError(str(exc)) from exc
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise click.UsageError(f"invalid spec file: {exc}") from exc
    except OSError as exc:
        raise click.ClickException(f"cannot open {exc.filename or ''}: {exc.strerror or exc}") from exc


def _validation_message(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in error['loc']) or 'spec'}: {error['msg']}" for error in exc.errors()
    )


def _default_cutoff(instance: Path, name: str) -> float:
    entry = registry.find_instance(name) or registry.find_instance(instance.stem)
    if entry is None:
        raise click.UsageError(f"{name} has no published cutoff; pass --cutoff-s or --iters")
    return float(entry.cutoff_seconds)


@click.group()
@click.option(
    "--log-level",
    envvar="LASBENCH_LOG_LEVEL",
    default="WARNING",
    show_default=True,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Diagnostics go to stderr at this level.",
)
def cli(log_level: str) -> None:
    """Late-acceptance local search on TSP and QAP benchmark instances."""
    logging.basicConfig(
        stream=sys.stderr,
        level=log_level.upper(),
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
    )


# =============================================================================
# SOLVE
# =============================================================================

@cli.command()
@click.argument("instance", type=click.Path(path_type=Path))
@click.option("--kind", type=_KINDS, help="Problem kind; inferred from .tsp / .dat when omitted.")
@click.option("--strategy", type=_STRATEGIES, default="dlas", show_default=True)
@click.option("-L", "--history-length", type=click.IntRange(min=1),
              help="Fitness array length (counter limit for SCHC). Defaults to the best published setting.")
@click.option("--counting", type=_COUNTING, default="all", show_default=True, help="SCHC counter variant.")
@click.option("--seed", type=click.IntRange(0, 2**63 - 1), default=0, show_default=True)
@click.option("--cutoff-s", type=click.FloatRange(min=0, min_open=True), help="Wall-clock cutoff in seconds.")
@click.option("--iters", type=click.IntRange(min=0), help="Iteration budget.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the (iteration, elapsed_s, F, F_best) trace to this CSV.")
@click.option("--trace-period", type=click.IntRange(min=1), default=DEFAULT_TRACE_PERIOD, show_default=True)
def solve(
    instance: Path,
    kind: Optional[str],
    strategy: str,
    history_length: Optional[int],
    counting: str,
    seed: int,
    cutoff_s: Optional[float],
    iters: Optional[int],
    trace_path: Optional[Path],
    trace_period: int,
) -> None:
    """Run one search and print a tab-separated result line."""
    if cutoff_s is not None and iters is not None:
        raise click.UsageError("--cutoff-s and --iters are mutually exclusive")

    with _translate_errors():
        problem = load_problem(instance, ProblemKind(kind) if kind else None)
        problem_kind = problem_kind_of(problem)
        strategy_kind = StrategyKind(strategy)
        config = StrategyConfig(
            kind=strategy_kind,
            history_length=history_length or registry.default_history_length(strategy_kind, problem_kind),
            counting=StepCounting(counting),
        )
        if cutoff_s is None and iters is None:
            cutoff_s = _default_cutoff(instance, problem.name)
        termination = Termination(cutoff_seconds=cutoff_s, iteration_budget=iters)

        recorder = TraceRecorder() if trace_path else None
        record = run_search(
            problem,
            config,
            termination,
            seed,
            recorder,
            trace_period=trace_period,
            best_known=registry.best_known_registry(problem.name),
        )
        if recorder is not None:
            write_atomic(trace_path, export_trace(recorder.points))

    fields = [
        ("instance", record.instance),
        ("strategy", config.kind.name),
        ("L", config.history_length),
        ("seed", record.seed),
        ("best", record.best_fitness),
        ("deviation", "" if record.deviation is None else record.deviation),
        ("time_to_last_best_s", f"{record.time_to_last_best:.3f}"),
        ("hc_like_pct", f"{record.hc_like_pct:.2f}"),
        ("iterations", record.iterations),
    ]
    click.echo("\t".join(f"{key}={value}" for key, value in fields))


# =============================================================================
# BENCH
# =============================================================================

@cli.command()
@click.argument("spec_path", metavar="SPEC", type=click.Path(path_type=Path))
@click.option("-o", "--out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Results file; .jsonl writes JSON lines, anything else CSV.")
@click.option("--workers", envvar="LASBENCH_WORKERS", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--traces", "trace_dir", type=click.Path(file_okay=False, path_type=Path),
              help="Directory for per-run trace CSVs (needs trace_period in the spec).")
@click.option("--store", is_flag=True, help="Also save the experiment to the DATABASE_URL results store.")
def bench(spec_path: Path, out: Path, workers: int, trace_dir: Optional[Path], store: bool) -> None:
    """Run an experiment spec (JSON or TOML) and write its results."""
    with _translate_errors():
        spec = load_experiment_spec(spec_path)
        result = run_experiment(spec, workers=workers)
        # Budget-only experiments are reproducible, so their files carry no wall-clock columns.
        include_timing = result.spec.cutoff_seconds is not None
        write_results(out, result.records, result.aggregates, include_timing=include_timing)
        if trace_dir is not None:
            written = write_traces(trace_dir, result.records)
            logger.info("wrote %d trace files to %s", len(written), trace_dir)

    _print_summary(result)
    if store:
        _store_result(result)


def _print_summary(result: ExperimentResult) -> None:
    entry = None if result.spec.best_known is None else registry.find_instance(result.instance_name)
    click.echo(f"{result.instance_name}: {result.spec.runs_per_config} runs per strategy")
    click.echo(
        f"{'strategy':<18}{'mean best':>16}{'mean dev':>14}{'published':>12}"
        f"{'t_last_best':>13}{'hc_like%':>10}  sig"
    )
    for row in result.aggregates:
        deviation = "" if row.mean_deviation is None else f"{row.mean_deviation:.1f}"
        published = None if entry is None else registry.published_deviation(entry, row.strategy.kind)
        published_text = "" if published is None else str(published)
        marker = "*" if row.winner else ""
        click.echo(
            f"{row.label:<18}{row.mean_best_fitness:>16.1f}{deviation:>14}{published_text:>12}"
            f"{row.mean_time_to_last_best:>13.3f}{row.mean_hc_like_pct:>10.2f}  {marker}"
        )


def _store_result(result: ExperimentResult) -> None:
    from . import crud, database

    try:
        database.init_db()
        db = database.get_session_factory()()
    except RuntimeError as exc:
        raise click.ClickException(str(exc)) from exc
    try:
        db_experiment = crud.save_experiment(db, result)
        db.commit()
        click.echo(f"stored as experiment {db_experiment.id}", err=True)
    except Exception as exc:
        db.rollback()
        raise click.ClickException(f"failed to store experiment: {exc}") from exc
    finally:
        db.close()


# =============================================================================
# CALIBRATE
# =============================================================================

@cli.command()
@click.argument("instance", type=click.Path(path_type=Path))
@click.option("--kind", type=_KINDS)
@click.option("--runs", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--trap-fraction", type=click.FloatRange(0, 1, min_open=True, max_open=True),
              default=registry.DEFAULT_TRAP_FRACTION, show_default=True,
              help="Stop a run once it has not improved for this share of its elapsed time.")
@click.option("--ceiling-s", type=click.FloatRange(min=0, min_open=True), required=True,
              help="Hard limit on each calibration run.")
@click.option("--seed", type=click.IntRange(0, 2**63 - 1), default=0, show_default=True)
@click.option("-L", "--history-length", type=click.IntRange(min=1),
              default=registry.CALIBRATION_HISTORY_LENGTH, show_default=True)
def calibrate(
    instance: Path,
    kind: Optional[str],
    runs: int,
    trap_fraction: float,
    ceiling_s: float,
    seed: int,
    history_length: int,
) -> None:
    """Print a cutoff in seconds: the longest LAHC run before it stalls."""
    with _translate_errors():
        problem = load_problem(instance, ProblemKind(kind) if kind else None)
        cutoff = calibrate_cutoff(
            problem,
            runs,
            trap_fraction=trap_fraction,
            ceiling_seconds=ceiling_s,
            base_seed=seed,
            history_length=history_length,
        )
    click.echo(f"{cutoff:.3f}")


# =============================================================================
# FORMATS & SERVE
# =============================================================================

@cli.command()
@click.option(
    "--example", "example_kind", type=_KINDS, default=None, help="Print a small instance in this format and exit."
)
def formats(example_kind: Optional[str]) -> None:
    """List the supported instance formats and the bundled benchmark registry."""
    if example_kind is not None:
        click.echo(_example_instance(ProblemKind(example_kind)), nl=False)
        return
    click.echo("tsp  TSPLIB, TYPE: TSP with EDGE_WEIGHT_TYPE EUC_2D or CEIL_2D (.tsp)")
    click.echo("qap  QAPLIB, n followed by matrices A and B (.dat)")
    click.echo("")
    click.echo(f"{'instance':<10}{'kind':<6}{'best known':>14}{'cutoff_s':>10}")
    for entry in registry.REGISTRY.values():
        click.echo(f"{entry.name:<10}{entry.kind.value:<6}{entry.best_known:>14}{entry.cutoff_seconds:>10g}")


def _example_instance(kind: ProblemKind) -> str:
    if kind is ProblemKind.TSP:
        square = np.array([[0.0, 0.0], [0.0, 3.0], [4.0, 3.0], [4.0, 0.0]])
        return serialize_tsplib(TspInstance(name="square4", coordinates=square, comment="4-city example"))
    flows = np.array([[0, 3, 1], [3, 0, 2], [1, 2, 0]])
    distances = np.array([[0, 5, 2], [5, 0, 4], [2, 4, 0]])
    return serialize_qaplib(QapInstance(name="example3", matrix_a=flows, matrix_b=distances))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Serve the read-only results API with uvicorn."""
    import uvicorn

    from . import database

    try:
        database.init_db()
    except RuntimeError as exc:
        raise click.ClickException(str(exc)) from exc
    uvicorn.run("app.main:app", host=host, port=port)


def main() -> None:
    cli(prog_name="lasbench")
