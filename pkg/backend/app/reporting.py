"""CSV and JSON-lines export of run records, aggregates and traces."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Literal, Sequence, Union

from .exceptions import ConfigurationError
from .schemas import AggregateRow, RunRecord, TracePoint

ExportFormat = Literal["csv", "jsonl"]

RUN_COLUMNS = [
    "instance",
    "strategy",
    "L",
    "seed",
    "best_fitness",
    "deviation",
    "time_to_last_best_s",
    "hc_like_pct",
    "iterations",
    "accepted",
    "last_best_iteration",
]

AGGREGATE_COLUMNS = [
    "strategy",
    "L",
    "runs",
    "mean_best_fitness",
    "mean_deviation",
    "mean_time_to_last_best_s",
    "mean_hc_like_pct",
    "mean_iterations",
    "significant_vs",
    "winner",
]

TRACE_COLUMNS = ["iteration", "elapsed_s", "F", "F_best"]


def _blank(value) -> str:
    return "" if value is None else str(value)


def run_row(record: RunRecord, include_timing: bool = True) -> dict:
    return {
        "instance": record.instance,
        "strategy": record.strategy.kind.name,
        "L": record.strategy.history_length,
        "seed": record.seed,
        "best_fitness": record.best_fitness,
        "deviation": record.deviation,
        "time_to_last_best_s": round(record.time_to_last_best, 6) if include_timing else None,
        "hc_like_pct": round(record.hc_like_pct, 4),
        "iterations": record.iterations,
        "accepted": record.accepted,
        "last_best_iteration": record.last_best_iteration,
    }


def aggregate_row(row: AggregateRow, include_timing: bool = True) -> dict:
    significant = sorted(label for label, flag in row.significant_vs.items() if flag)
    return {
        "strategy": row.strategy.kind.name,
        "L": row.strategy.history_length,
        "runs": row.runs,
        "mean_best_fitness": round(row.mean_best_fitness, 4),
        "mean_deviation": None if row.mean_deviation is None else round(row.mean_deviation, 4),
        "mean_time_to_last_best_s": round(row.mean_time_to_last_best, 6) if include_timing else None,
        "mean_hc_like_pct": round(row.mean_hc_like_pct, 4),
        "mean_iterations": round(row.mean_iterations, 4),
        "significant_vs": ";".join(significant),
        "winner": "*" if row.winner else "",
    }


def export_results(
    records: Sequence[RunRecord],
    aggregates: Sequence[AggregateRow],
    fmt: ExportFormat = "csv",
    include_timing: bool = True,
) -> bytes:
    """Serialise runs followed by the per-strategy aggregate block.

    CSV puts the run table first, then an empty line and the aggregate table.
    JSON lines tags each object with ``"record": "run"`` or ``"aggregate"``.
    With ``include_timing`` off the wall-clock columns are left empty, which
    makes the output reproducible for iteration-budget experiments.
    """
    runs = [run_row(record, include_timing) for record in records]
    blocks = [aggregate_row(row, include_timing) for row in aggregates]

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(RUN_COLUMNS)
        writer.writerows([_blank(row[column]) for column in RUN_COLUMNS] for row in runs)
        if blocks:
            writer.writerow([])
            writer.writerow(AGGREGATE_COLUMNS)
            writer.writerows([_blank(row[column]) for column in AGGREGATE_COLUMNS] for row in blocks)
        return buffer.getvalue().encode("utf-8")

    if fmt == "jsonl":
        lines = [json.dumps({"record": "run", **row}) for row in runs]
        lines += [json.dumps({"record": "aggregate", **row}) for row in blocks]
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""

    raise ConfigurationError(f"unknown export format {fmt!r}; expected 'csv' or 'jsonl'")


def export_trace(points: Iterable[TracePoint]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for point in points:
        writer.writerow([point.iteration, f"{point.elapsed:.6f}", point.current, point.best])
    return buffer.getvalue().encode("utf-8")


def write_atomic(path: Union[str, Path], payload: bytes) -> Path:
    """Write ``payload`` next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return path


def write_results(
    path: Union[str, Path],
    records: Sequence[RunRecord],
    aggregates: Sequence[AggregateRow],
    include_timing: bool = True,
) -> Path:
    path = Path(path)
    fmt: ExportFormat = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    return write_atomic(path, export_results(records, aggregates, fmt, include_timing))


def trace_file_name(record: RunRecord) -> str:
    return f"{record.instance}_{record.strategy.kind.value}_L{record.strategy.history_length}_run{record.run_index}.csv"


def write_traces(directory: Union[str, Path], records: Sequence[RunRecord]) -> list[Path]:
    """One trace CSV per record that carries a trace."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [
        write_atomic(directory / trace_file_name(record), export_trace(record.trace))
        for record in records
        if record.trace
    ]
