"""Weight-movement and connectivity metrics, plus figure-data assembly.

Weight movement compares the trained dense baseline against a trained
pruned network over the kept positions only:

    abs_dif = sum(|baseline - current|)      (kept positions)
    avg_dif = abs_dif / kept_count

The sum accumulates strictly left to right in layer-major, row-major
order (np.add.accumulate), so it is bit-identical to an element loop and
reproducible across runs.

Connectivity counts the unmasked incoming weights of every unit, the
signal used to diagnose over-pruning bottlenecks where units end up with
one or zero inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ShapeError, UsageError
from .masks import PruneMask
from .nn import DenseNetwork
from .results import Table

if TYPE_CHECKING:
    from .lottery import ExperimentRecord


@dataclass(frozen=True)
class MovementReport:
    weight_abs_dif: float
    weight_avg_dif: float
    unpruned_count: int


@dataclass(eq=False)
class LayerConnectivity:
    """Incoming kept-weight count per unit of one layer."""

    incoming: np.ndarray

    @property
    def min(self) -> int:
        return int(self.incoming.min())

    @property
    def max(self) -> int:
        return int(self.incoming.max())

    @property
    def mean(self) -> float:
        return float(self.incoming.mean())


@dataclass(eq=False)
class ConnectivityReport:
    per_layer: list[LayerConnectivity]


def weight_movement(
    baseline: DenseNetwork, current: DenseNetwork, mask: PruneMask
) -> MovementReport:
    """Total and per-kept-weight absolute distance between two trained networks.

    Only positions kept by `mask` enter the sum. Raises UsageError when the
    mask keeps nothing (the average would be undefined).
    """
    if baseline.layer_sizes != current.layer_sizes:
        raise ShapeError(
            f"architectures differ: {baseline.layer_sizes} vs {current.layer_sizes}"
        )
    if len(mask.layers) != len(baseline.weights):
        raise ShapeError("mask layer count does not match the networks")
    parts = []
    for l, (b, c, m) in enumerate(zip(baseline.weights, current.weights, mask.layers)):
        if m.shape != b.shape:
            raise ShapeError(f"layer {l}: mask shape {m.shape} vs weight shape {b.shape}")
        diffs = np.abs(b - c).ravel()
        parts.append(diffs[m.astype(bool).ravel()])
    kept = np.concatenate(parts)
    if kept.size == 0:
        raise UsageError("mask keeps no weights; average movement is undefined")
    abs_dif = float(np.add.accumulate(kept)[-1])
    return MovementReport(
        weight_abs_dif=abs_dif,
        weight_avg_dif=abs_dif / kept.size,
        unpruned_count=int(kept.size),
    )


def connectivity_report(mask: PruneMask) -> ConnectivityReport:
    """Per-unit count of unmasked incoming weights, layer by layer."""
    return ConnectivityReport(
        [LayerConnectivity(m.sum(axis=1, dtype=np.int64)) for m in mask.layers]
    )


FIGURES = ("accuracy_vs_sparsity", "movement_vs_sparsity", "width_comparison", "batch_comparison")


def _series_label(record: "ExperimentRecord") -> str:
    return record.label if record.label else f"{record.method}/{record.mode}"


def _final_best(record: "ExperimentRecord") -> float:
    return record.rows[-1].best_accuracy


def figure_data(records: Sequence["ExperimentRecord"], figure: str) -> Table:
    """Assemble plot-ready long-format data from experiment records.

    accuracy_vs_sparsity / movement_vs_sparsity: one row per record row,
    (series, x=fraction_pruned, y, seed). width_comparison: final pruned
    and dense baseline accuracy per record, x = first hidden width (needs
    record.arch). batch_comparison: mean and sample stddev of the final
    best accuracy across seeds, grouped by Fisher batch size.
    """
    if figure not in FIGURES:
        raise UsageError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    if not records:
        raise UsageError("no records supplied")

    if figure in ("accuracy_vs_sparsity", "movement_vs_sparsity"):
        rows = []
        for rec in records:
            for row in rec.rows:
                y = row.test_accuracy if figure == "accuracy_vs_sparsity" else row.weight_avg_dif
                rows.append((_series_label(rec), row.fraction_pruned, y, rec.seed))
        return Table(("series", "x", "y", "seed"), rows)

    if figure == "width_comparison":
        rows = []
        for rec in records:
            if rec.arch is not None and len(rec.arch) >= 3:
                width = rec.arch[1]
            elif rec.label:
                width = rec.label
            else:
                raise UsageError(
                    "width_comparison needs a width per record (an architecture or a "
                    "width label); records loaded from CSV carry neither by default"
                )
            rows.append((f"pruned:{rec.method}", width, _final_best(rec), rec.seed))
            rows.append(("dense", width, rec.rows[0].best_accuracy, rec.seed))
        rows.sort(key=lambda r: (r[0], str(r[1]), r[3]))
        return Table(("series", "x", "y", "seed"), rows)

    groups: dict[int, list[float]] = {}
    for rec in records:
        if rec.fisher_batch_size is None:
            raise UsageError("batch_comparison needs records produced by the fisher strategy")
        groups.setdefault(rec.fisher_batch_size, []).append(_final_best(rec))
    rows = []
    for bs in sorted(groups):
        ys = np.asarray(groups[bs])
        stddev = float(ys.std(ddof=1)) if ys.size > 1 else 0.0
        rows.append(("fisher", bs, float(ys.mean()), stddev, int(ys.size)))
    return Table(("series", "x", "y_mean", "y_stddev", "n_seeds"), rows)
