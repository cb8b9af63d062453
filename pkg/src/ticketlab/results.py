"""Tabular results and their CSV serialization.

One fixed schema covers every experiment record:

    experiment_id, method, mode, seed, round, fraction_pruned,
    test_accuracy, best_accuracy, train_loss, weight_abs_dif,
    weight_avg_dif, backward_passes, seconds

Floats are printed with 17 significant digits so parsing a file recovers
the exact binary values; lines end with LF; identical runs therefore
produce byte-identical files (the seconds column is the only
non-deterministic content).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataFormatError, UsageError

RECORD_COLUMNS = (
    "experiment_id",
    "method",
    "mode",
    "seed",
    "round",
    "fraction_pruned",
    "test_accuracy",
    "best_accuracy",
    "train_loss",
    "weight_abs_dif",
    "weight_avg_dif",
    "backward_passes",
    "seconds",
)


@dataclass(frozen=True)
class Table:
    """Column names plus rows of plain Python values."""

    columns: tuple[str, ...]
    rows: Sequence[tuple]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise UsageError(
                    f"row has {len(row)} cells but table has {len(self.columns)} columns"
                )


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_csv(table: Table) -> str:
    """Serialize a table to CSV text (header row, LF newlines)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_format_cell(v) for v in row])
    return buf.getvalue()


def emit_csv(table: Table, path) -> None:
    """Write a table to `path` as UTF-8 CSV."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(render_csv(table))
    except OSError as exc:
        raise DataFormatError(f"cannot write CSV to {path}: {exc}") from exc


def record_table(records: Iterable) -> Table:
    """Flatten ExperimentRecords into the fixed 13-column schema."""
    rows = []
    for rec in records:
        for row in rec.rows:
            rows.append(
                (
                    rec.experiment_id,
                    rec.method,
                    rec.mode,
                    rec.seed,
                    row.round,
                    row.fraction_pruned,
                    row.test_accuracy,
                    row.best_accuracy,
                    row.train_loss,
                    row.weight_abs_dif,
                    row.weight_avg_dif,
                    row.backward_passes,
                    row.seconds,
                )
            )
    return Table(RECORD_COLUMNS, rows)


def read_records_csv(path) -> list:
    """Rebuild ExperimentRecords from a CSV in the fixed schema.

    Records loaded this way carry no architecture or Fisher batch size;
    figure kinds that need those reject them with a usage error.
    """
    from .lottery import ExperimentRecord, RoundRow

    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or tuple(header) != RECORD_COLUMNS:
                raise DataFormatError(
                    f"{path}: expected header {','.join(RECORD_COLUMNS)}, got {header}"
                )
            grouped: dict[tuple, list] = {}
            order: list[tuple] = []
            for line in reader:
                if len(line) != len(RECORD_COLUMNS):
                    raise DataFormatError(f"{path}: row has {len(line)} cells")
                key = (line[0], line[1], line[2], int(line[3]))
                if key not in grouped:
                    grouped[key] = []
                    order.append(key)
                grouped[key].append(
                    RoundRow(
                        round=int(line[4]),
                        fraction_pruned=float(line[5]),
                        test_accuracy=float(line[6]),
                        best_accuracy=float(line[7]),
                        train_loss=float(line[8]),
                        weight_abs_dif=float(line[9]),
                        weight_avg_dif=float(line[10]),
                        backward_passes=int(line[11]),
                        seconds=float(line[12]),
                    )
                )
    except OSError as exc:
        raise DataFormatError(f"cannot read CSV {path}: {exc}") from exc
    except ValueError as exc:
        raise DataFormatError(f"{path}: malformed cell: {exc}") from exc

    return [
        ExperimentRecord(
            experiment_id=key[0],
            method=key[1],
            mode=key[2],
            seed=key[3],
            arch=None,
            fisher_batch_size=None,
            rows=grouped[key],
        )
        for key in order
    ]
