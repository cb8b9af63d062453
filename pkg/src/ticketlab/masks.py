"""Binary pruning masks, sparsity accounting, and weight rewinding.

A mask mirrors a network's weight matrices with uint8 entries: 1 keeps the
weight, 0 prunes it. Biases are never masked. Masks are stored densely so
positional lookup stays O(1) for the scoring strategies. All operations
here are pure functions over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeError
from .nn import DenseNetwork, check_layer_sizes


@dataclass(eq=False)
class PruneMask:
    """Per-layer keep/drop indicators, shape-identical to the paired weights."""

    layers: list[np.ndarray]

    def __post_init__(self) -> None:
        clean = []
        for l, m in enumerate(self.layers):
            m = np.asarray(m)
            if m.ndim != 2:
                raise ShapeError(f"mask layer {l} must be 2-D, got shape {m.shape}")
            if not np.isin(m, (0, 1)).all():
                raise ShapeError(f"mask layer {l} has entries outside {{0, 1}}")
            if l > 0 and m.shape[1] != clean[l - 1].shape[0]:
                raise ShapeError(f"mask layer {l} does not chain with layer {l - 1}")
            clean.append(m.astype(np.uint8))
        self.layers = clean

    def copy(self) -> "PruneMask":
        return PruneMask([m.copy() for m in self.layers])

    def kept_count(self) -> int:
        return int(sum(int(m.sum()) for m in self.layers))

    def total_count(self) -> int:
        return int(sum(m.size for m in self.layers))


@dataclass(frozen=True)
class LayerSparsity:
    total: int
    pruned: int

    @property
    def fraction_pruned(self) -> float:
        return self.pruned / self.total


@dataclass(frozen=True)
class SparsityReport:
    """Exact pruned/kept counts, overall and per layer."""

    total_weights: int
    pruned_weights: int
    fraction_pruned: float
    per_layer: tuple[LayerSparsity, ...]


def full_mask(arch: Sequence[int]) -> PruneMask:
    """All-ones mask for the given architecture (nothing pruned)."""
    sizes = check_layer_sizes(arch)
    return PruneMask(
        [np.ones((sizes[l + 1], sizes[l]), dtype=np.uint8) for l in range(len(sizes) - 1)]
    )


def _check_pairing(net: DenseNetwork, mask: PruneMask) -> None:
    if len(mask.layers) != len(net.weights):
        raise ShapeError(
            f"mask has {len(mask.layers)} layers, network has {len(net.weights)}"
        )
    for l, (m, w) in enumerate(zip(mask.layers, net.weights)):
        if m.shape != w.shape:
            raise ShapeError(f"layer {l}: mask shape {m.shape} vs weight shape {w.shape}")


def apply_mask(net: DenseNetwork, mask: PruneMask) -> DenseNetwork:
    """Zero the masked weight positions; kept positions and biases are untouched."""
    _check_pairing(net, mask)
    weights = [np.where(m.astype(bool), w, 0.0) for m, w in zip(mask.layers, net.weights)]
    return DenseNetwork(weights, [b.copy() for b in net.biases])


def rewind(trained: DenseNetwork, initial: DenseNetwork, mask: PruneMask) -> DenseNetwork:
    """Reset kept weights (and all biases) to their values in `initial`.

    Masked positions come out exactly 0 even where the initial value was
    nonzero; `trained` only contributes its architecture.
    """
    if trained.layer_sizes != initial.layer_sizes:
        raise ShapeError(
            f"architectures differ: {trained.layer_sizes} vs {initial.layer_sizes}"
        )
    return apply_mask(initial, mask)


def sparsity(mask: PruneMask) -> SparsityReport:
    """Exact integer sparsity accounting for a mask."""
    per_layer = []
    for m in mask.layers:
        total = int(m.size)
        per_layer.append(LayerSparsity(total=total, pruned=total - int(m.sum())))
    total = sum(e.total for e in per_layer)
    pruned = sum(e.pruned for e in per_layer)
    return SparsityReport(
        total_weights=total,
        pruned_weights=pruned,
        fraction_pruned=pruned / total,
        per_layer=tuple(per_layer),
    )
