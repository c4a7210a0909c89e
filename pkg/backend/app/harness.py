"""Experiment orchestration: batches of seeded runs, aggregates, significance
tests and cutoff calibration."""
from __future__ import annotations

import errno
import json
import logging
import math
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor
from itertools import permutations
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy import stats as sp_stats

from .exceptions import ConfigurationError, InstanceParseError
from .qap import QapProblem, load_qaplib
from .registry import CALIBRATION_HISTORY_LENGTH, DEFAULT_TRAP_FRACTION, find_instance
from .schemas import (
    AggregateRow,
    ExperimentResult,
    ExperimentSpec,
    ProblemKind,
    RunRecord,
    StrategyConfig,
    StrategyKind,
    Termination,
)
from .search import DEFAULT_TRACE_PERIOD, Problem, TraceRecorder, derive_seed, run_search
from .tsp import TspProblem, load_tsplib

logger = logging.getLogger(__name__)

_SUFFIX_KINDS = {".tsp": ProblemKind.TSP, ".dat": ProblemKind.QAP}


# =============================================================================
# INSTANCES
# =============================================================================

def infer_kind(path: Union[str, Path]) -> ProblemKind:
    suffix = Path(path).suffix.lower()
    if suffix not in _SUFFIX_KINDS:
        raise ConfigurationError(f"cannot infer the problem kind of {str(path)!r}; pass it explicitly (tsp or qap)")
    return _SUFFIX_KINDS[suffix]


def problem_kind_of(problem: Problem) -> ProblemKind:
    return ProblemKind.TSP if isinstance(problem, TspProblem) else ProblemKind.QAP


def load_problem(path: Union[str, Path], kind: Optional[ProblemKind] = None) -> Problem:
    """Parse an instance file into a search problem.

    A missing file raises FileNotFoundError before the kind is inferred. Parse
    errors are re-raised with the file name as their source.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(errno.ENOENT, os.strerror(errno.ENOENT), str(path))
    kind = kind or infer_kind(path)
    try:
        if kind is ProblemKind.TSP:
            problem: Problem = TspProblem(load_tsplib(path))
        else:
            problem = QapProblem(load_qaplib(path))
    except InstanceParseError as exc:
        raise InstanceParseError(exc.reason, exc.line, exc.text, source=path.name) from exc
    problem.check_size()
    return problem


# =============================================================================
# EXPERIMENTS
# =============================================================================

class _RunJob(NamedTuple):
    problem: Problem
    strategy: StrategyConfig
    termination: Termination
    seed: int
    run_index: int
    best_known: Optional[int]
    trace_period: Optional[int]


def _execute(job: _RunJob) -> RunRecord:
    recorder = TraceRecorder() if job.trace_period else None
    record = run_search(
        job.problem,
        job.strategy,
        job.termination,
        job.seed,
        recorder,
        trace_period=job.trace_period or DEFAULT_TRACE_PERIOD,
        best_known=job.best_known,
        run_index=job.run_index,
    )
    if recorder is not None:
        record = record.model_copy(update={"trace": recorder.points})
    return record


def resolve_spec(spec: ExperimentSpec, problem: Problem) -> ExperimentSpec:
    """Fill best_known and, if no termination was given, the published cutoff."""
    entry = find_instance(problem.name) or find_instance(spec.instance.stem)
    update: dict = {}
    if spec.best_known is None and entry is not None:
        update["best_known"] = entry.best_known
    if spec.cutoff_seconds is None and spec.iteration_budget is None:
        if entry is None:
            raise ConfigurationError(
                f"{problem.name}: no cutoff_seconds or iteration_budget given and no published cutoff is bundled"
            )
        update["cutoff_seconds"] = float(entry.cutoff_seconds)
    if spec.kind is None:
        update["kind"] = problem_kind_of(problem)
    return spec.model_copy(update=update) if update else spec


def run_experiment(spec: ExperimentSpec, workers: int = 1, problem: Optional[Problem] = None) -> ExperimentResult:
    """Run every strategy ``runs_per_config`` times and aggregate the results.

    Run ``i`` of each strategy uses ``derive_seed(base_seed, i)``, so all
    strategies start from the same initial solutions. Records come back in
    (strategy, run index) order whatever the worker count.
    """
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    if problem is None:
        problem = load_problem(spec.instance, spec.kind)
    spec = resolve_spec(spec, problem)
    termination = spec.termination()

    jobs = [
        _RunJob(problem, strategy, termination, derive_seed(spec.base_seed, run_index), run_index,
                spec.best_known, spec.trace_period)
        for strategy in spec.strategies
        for run_index in range(spec.runs_per_config)
    ]
    logger.info(
        "experiment on %s: %d strategies x %d runs, %d worker(s)",
        problem.name, len(spec.strategies), spec.runs_per_config, workers,
    )

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute, jobs))
    else:
        records = [_execute(job) for job in jobs]

    for record in records:
        logger.info(
            "%s run %d: best %d after %d iterations",
            record.label, record.run_index, record.best_fitness, record.iterations,
        )

    aggregates = aggregate(records, spec.strategies, spec.confidence)
    logger.info("experiment on %s finished", problem.name)
    return ExperimentResult(spec=spec, instance_name=problem.name, records=records, aggregates=aggregates)


# =============================================================================
# STATISTICS
# =============================================================================

class WelchResult(NamedTuple):
    statistic: float
    significant: bool


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float], confidence: float = 0.95) -> WelchResult:
    """Two-sided unpaired t-test with unequal variances.

    When both samples are constant the test is undefined; the samples then
    differ significantly exactly when their means differ.
    """
    if not 0 < confidence < 1:
        raise ConfigurationError(f"confidence must be in (0, 1), got {confidence}")
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ConfigurationError(f"t-test needs at least 2 values per sample, got {a.size} and {b.size}")

    if a.var(ddof=1) == 0 and b.var(ddof=1) == 0:
        logger.warning("t-test skipped for two zero-variance samples; comparing means")
        diff = float(a.mean() - b.mean())
        if diff == 0:
            return WelchResult(0.0, False)
        return WelchResult(math.copysign(math.inf, diff), True)

    result = sp_stats.ttest_ind(a, b, equal_var=False)
    return WelchResult(float(result.statistic), bool(result.pvalue < 1 - confidence))


def aggregate(
    records: Sequence[RunRecord],
    strategies: Sequence[StrategyConfig],
    confidence: float = 0.95,
) -> list[AggregateRow]:
    """Per-strategy means plus pairwise significance of the best fitness."""
    groups: dict[str, list[RunRecord]] = {strategy.label: [] for strategy in strategies}
    for record in records:
        groups.setdefault(record.label, []).append(record)

    rows: list[AggregateRow] = []
    for strategy in strategies:
        group = groups[strategy.label]
        if not group:
            continue
        deviations = [record.deviation for record in group]
        rows.append(AggregateRow(
            strategy=strategy,
            runs=len(group),
            mean_best_fitness=float(np.mean([record.best_fitness for record in group])),
            mean_deviation=None if None in deviations else float(np.mean(deviations)),
            mean_time_to_last_best=float(np.mean([record.time_to_last_best for record in group])),
            mean_hc_like_pct=float(np.mean([record.hc_like_pct for record in group])),
            mean_iterations=float(np.mean([record.iterations for record in group])),
        ))

    for row, other in permutations(rows, 2):
        best_a = [record.best_fitness for record in groups[row.label]]
        best_b = [record.best_fitness for record in groups[other.label]]
        if len(best_a) < 2 or len(best_b) < 2:
            logger.warning("t-test skipped for %s vs %s: fewer than 2 runs", row.label, other.label)
            row.significant_vs[other.label] = False
            continue
        outcome = welch_t_test(best_a, best_b, confidence)
        row.significant_vs[other.label] = outcome.significant
        row.t_statistics[other.label] = outcome.statistic

    if len(rows) > 1:
        lowest = min(row.mean_best_fitness for row in rows)
        for row in rows:
            row.winner = row.mean_best_fitness == lowest and all(row.significant_vs.values())
    return rows


# =============================================================================
# CALIBRATION AND PARAMETER SWEEPS
# =============================================================================

def calibrate_cutoff(
    problem: Problem,
    runs: int,
    trap_fraction: float = DEFAULT_TRAP_FRACTION,
    ceiling_seconds: float = 3600.0,
    base_seed: int = 0,
    history_length: int = CALIBRATION_HISTORY_LENGTH,
) -> float:
    """Longest LAHC run time before stalling, over ``runs`` runs.

    A run stalls once it has found no new best for ``trap_fraction`` of its
    elapsed time; ``ceiling_seconds`` bounds every run.
    """
    if not 0 < trap_fraction < 1:
        raise ConfigurationError(f"trap_fraction must be in (0, 1), got {trap_fraction}")
    if runs < 1:
        raise ConfigurationError(f"runs must be >= 1, got {runs}")
    if not ceiling_seconds > 0:
        raise ConfigurationError(f"ceiling_seconds must be > 0, got {ceiling_seconds}")

    strategy = StrategyConfig(kind=StrategyKind.LAHC, history_length=history_length)
    termination = Termination(cutoff_seconds=ceiling_seconds, stall_fraction=trap_fraction)
    longest = 0.0
    for run_index in range(runs):
        record = run_search(problem, strategy, termination, derive_seed(base_seed, run_index), run_index=run_index)
        logger.info(
            "calibration run %d on %s: stalled after %.3f s (best %d)",
            run_index, problem.name, record.elapsed_seconds, record.best_fitness,
        )
        longest = max(longest, record.elapsed_seconds)
    return min(longest, ceiling_seconds)


class SweepResult(NamedTuple):
    best_length: int
    results: dict[int, ExperimentResult]


def history_sweep(
    spec: ExperimentSpec,
    kind: StrategyKind,
    lengths: Sequence[int],
    workers: int = 1,
    problem: Optional[Problem] = None,
) -> SweepResult:
    """Run ``spec`` once per history length of a single strategy kind.

    The best length is the one with the lowest mean best fitness; ties go to
    the length listed first.
    """
    if not lengths:
        raise ConfigurationError("history_sweep needs at least one length")
    if problem is None:
        problem = load_problem(spec.instance, spec.kind)
    results: dict[int, ExperimentResult] = {}
    for length in lengths:
        single = spec.model_copy(update={"strategies": [StrategyConfig(kind=kind, history_length=length)]})
        results[length] = run_experiment(single, workers=workers, problem=problem)
    best_length = min(lengths, key=lambda length: results[length].aggregates[0].mean_best_fitness)
    logger.info("history sweep for %s on %s: best L = %d", kind.name, problem.name, best_length)
    return SweepResult(best_length, results)


def load_experiment_spec(path: Union[str, Path]) -> ExperimentSpec:
    """Read an experiment spec from a JSON or TOML file.

    A relative ``instance`` path is taken relative to the spec file.
    """
    path = Path(path)
    if path.suffix.lower() == ".toml":
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    else:
        data = json.loads(path.read_text(encoding="utf-8"))
    spec = ExperimentSpec.model_validate(data)
    if not spec.instance.is_absolute():
        spec = spec.model_copy(update={"instance": path.parent / spec.instance})
    return spec
