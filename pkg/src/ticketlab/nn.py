"""Dense feed-forward classifier with hand-derived backpropagation.

Networks are stacks of weight matrices (shape out x in) and bias vectors,
ReLU on hidden layers and softmax on the output. Training is plain
minibatch SGD with deterministic seeded shuffling. A pruning mask rides
along through every operation: masked weight positions contribute nothing
to the forward pass, receive zero gradient, and stay exactly 0.0 through
any number of update steps. Biases are never masked.

All functions treat their inputs as immutable and return new values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .errors import ShapeError, UsageError
from . import rng

if TYPE_CHECKING:
    from .masks import PruneMask

# Stream tags (see rng.derive): 1 = weight init, 2 = epoch shuffling.
_INIT_STREAM = 1
_SHUFFLE_STREAM = 2


def check_layer_sizes(sizes: Sequence[int]) -> tuple[int, ...]:
    """Validate an architecture: at least [input, output], all dims >= 1."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 2:
        raise UsageError(f"architecture needs at least 2 layer sizes, got {sizes!r}")
    if any(s < 1 for s in sizes):
        raise UsageError(f"layer sizes must be >= 1, got {sizes!r}")
    return sizes


@dataclass(eq=False)
class DenseNetwork:
    """Weight matrices and bias vectors of a dense classifier.

    weights[l] has shape (sizes[l+1], sizes[l]); biases[l] has length
    sizes[l+1]. Everything is float64.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("weights and biases must be non-empty lists of equal length")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ShapeError(f"layer {l}: weight shape {w.shape} does not match bias {b.shape}")
            if l > 0 and w.shape[1] != self.weights[l - 1].shape[0]:
                raise ShapeError(
                    f"layer {l}: fan-in {w.shape[1]} does not chain with previous fan-out "
                    f"{self.weights[l - 1].shape[0]}"
                )

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    @property
    def num_classes(self) -> int:
        return self.weights[-1].shape[0]

    def copy(self) -> "DenseNetwork":
        return DenseNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def all_finite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(
            np.isfinite(b).all() for b in self.biases
        )


@dataclass(eq=False)
class GradientSet:
    """Partial derivatives of a scalar loss, shaped like a DenseNetwork."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass(frozen=True)
class TrainConfig:
    """Minibatch SGD schedule. Defaults: 10 epochs, lr 0.1, batch 128."""

    epochs: int = 10
    learning_rate: float = 0.1
    train_batch_size: int = 128
    seed: int = 0
    shuffle_each_epoch: bool = True

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise UsageError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise UsageError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.train_batch_size < 1:
            raise UsageError(f"train_batch_size must be >= 1, got {self.train_batch_size}")


@dataclass(eq=False)
class Dataset:
    """Row-major inputs (N x dim, float64) and integer class labels (N,)."""

    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.inputs.ndim != 2 or self.labels.ndim != 1:
            raise ShapeError("inputs must be 2-D and labels 1-D")
        if self.inputs.shape[0] != self.labels.shape[0]:
            raise ShapeError(
                f"row counts differ: {self.inputs.shape[0]} inputs vs {self.labels.shape[0]} labels"
            )
        if self.labels.size and self.labels.min() < 0:
            raise UsageError("labels must be non-negative class indices")
        if not np.isfinite(self.inputs).all():
            raise UsageError("inputs contain non-finite values")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    def take(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.inputs[indices], self.labels[indices])


def init_network(arch: Sequence[int], seed: int) -> DenseNetwork:
    """Seeded network: per-layer uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases.

    Layer l draws sizes[l+1]*sizes[l] uniforms in row-major order from the
    substream derive(seed, 1, l); identical seeds give bit-identical networks.
    """
    sizes = check_layer_sizes(arch)
    weights, biases = [], []
    for l in range(len(sizes) - 1):
        fan_in, fan_out = sizes[l], sizes[l + 1]
        bound = 1.0 / math.sqrt(fan_in)
        u = rng.uniforms(rng.derive(seed, _INIT_STREAM, l), fan_out * fan_in)
        weights.append(((2.0 * u - 1.0) * bound).reshape(fan_out, fan_in))
        biases.append(np.zeros(fan_out))
    return DenseNetwork(weights, biases)


def _kept_layers(net: DenseNetwork, mask: Optional["PruneMask"]) -> list[np.ndarray]:
    """Boolean keep-indicators per layer; a missing mask keeps everything."""
    if mask is None:
        return [np.ones(w.shape, dtype=bool) for w in net.weights]
    if len(mask.layers) != len(net.weights):
        raise ShapeError(f"mask has {len(mask.layers)} layers, network has {len(net.weights)}")
    kept = []
    for l, (m, w) in enumerate(zip(mask.layers, net.weights)):
        if m.shape != w.shape:
            raise ShapeError(f"layer {l}: mask shape {m.shape} vs weight shape {w.shape}")
        kept.append(m.astype(bool))
    return kept


def _forward_arrays(
    weights: list[np.ndarray], biases: list[np.ndarray], inputs: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Forward pass keeping intermediates: returns (pre-activations, layer inputs)."""
    pre, layer_in = [], []
    a = inputs
    last = len(weights) - 1
    for l, (w, b) in enumerate(zip(weights, biases)):
        layer_in.append(a)
        z = a @ w.T + b
        pre.append(z)
        a = np.maximum(z, 0.0) if l < last else z
    return pre, layer_in


def _softmax_from_logits(logits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stable softmax; returns (probabilities, log-sum-exp per row)."""
    m = logits.max(axis=1, keepdims=True)
    e = np.exp(logits - m)
    s = e.sum(axis=1, keepdims=True)
    return e / s, (m + np.log(s))


def forward(net: DenseNetwork, mask: Optional["PruneMask"], inputs: np.ndarray) -> np.ndarray:
    """Class probabilities for a batch of inputs.

    Hidden layers use ReLU, the output is a softmax; masked-out weights
    contribute exactly 0 regardless of the values stored in `net`.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != net.layer_sizes[0]:
        raise ShapeError(
            f"inputs must be (N, {net.layer_sizes[0]}), got {inputs.shape}"
        )
    kept = _kept_layers(net, mask)
    weights = [np.where(k, w, 0.0) for k, w in zip(kept, net.weights)]
    pre, _ = _forward_arrays(weights, net.biases, inputs)
    probs, _ = _softmax_from_logits(pre[-1])
    return probs


def _loss_and_grads_arrays(
    weights: list[np.ndarray],
    biases: list[np.ndarray],
    kept: list[np.ndarray],
    inputs: np.ndarray,
    labels: np.ndarray,
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean cross-entropy and its exact gradients; weights must already be masked."""
    n = inputs.shape[0]
    pre, layer_in = _forward_arrays(weights, biases, inputs)
    probs, lse = _softmax_from_logits(pre[-1])
    rows = np.arange(n)
    loss = float(np.mean(lse[:, 0] - pre[-1][rows, labels]))

    delta = probs
    delta[rows, labels] -= 1.0
    delta /= n
    grad_w: list[np.ndarray] = []
    grad_b: list[np.ndarray] = []
    for l in range(len(weights) - 1, -1, -1):
        grad_w.append(np.where(kept[l], delta.T @ layer_in[l], 0.0))
        grad_b.append(delta.sum(axis=0))
        if l > 0:
            delta = (delta @ weights[l]) * (pre[l - 1] > 0.0)
    grad_w.reverse()
    grad_b.reverse()
    return loss, grad_w, grad_b


def loss_and_grads(
    net: DenseNetwork, mask: Optional["PruneMask"], batch: Dataset
) -> tuple[float, GradientSet]:
    """Mean softmax cross-entropy over the batch and its analytic gradients.

    Gradients at masked positions are exactly 0. Raises UsageError on an
    empty batch or out-of-range labels.
    """
    if len(batch) == 0:
        raise UsageError("loss_and_grads requires a non-empty batch")
    if batch.dim != net.layer_sizes[0]:
        raise ShapeError(f"batch dim {batch.dim} vs network input dim {net.layer_sizes[0]}")
    if int(batch.labels.max()) >= net.num_classes:
        raise UsageError(
            f"label {int(batch.labels.max())} out of range for {net.num_classes} classes"
        )
    kept = _kept_layers(net, mask)
    weights = [np.where(k, w, 0.0) for k, w in zip(kept, net.weights)]
    loss, grad_w, grad_b = _loss_and_grads_arrays(
        weights, net.biases, kept, batch.inputs, batch.labels
    )
    return loss, GradientSet(grad_w, grad_b)


def sgd_step(
    net: DenseNetwork, grads: GradientSet, mask: Optional["PruneMask"], lr: float
) -> DenseNetwork:
    """One gradient-descent update: w <- w - lr*g at kept positions, masked stay 0.

    Biases are always updated.
    """
    kept = _kept_layers(net, mask)
    weights = [
        np.where(k, w - lr * g, 0.0) for k, w, g in zip(kept, net.weights, grads.weights)
    ]
    biases = [b - lr * g for b, g in zip(net.biases, grads.biases)]
    return DenseNetwork(weights, biases)


def train(
    net: DenseNetwork,
    mask: Optional["PruneMask"],
    data: Dataset,
    cfg: TrainConfig,
    eval_data: Optional[Dataset] = None,
) -> tuple[DenseNetwork, list[tuple[float, float]]]:
    """Minibatch SGD for cfg.epochs epochs; returns the trained network and history.

    History holds one (train_loss, test_accuracy) pair per epoch:
    train_loss is the sample-weighted mean of the minibatch losses seen
    during the epoch, accuracy is measured on `eval_data` (falling back to
    `data`). Shuffling uses the substream derive(cfg.seed, 2, epoch), so
    identical (net, mask, data, cfg) reproduce bit-identical results.
    Masked weights are zeroed before the first step and stay 0 throughout.
    """
    if len(data) == 0:
        raise UsageError("cannot train on an empty dataset")
    if data.dim != net.layer_sizes[0]:
        raise ShapeError(f"data dim {data.dim} vs network input dim {net.layer_sizes[0]}")
    if int(data.labels.max()) >= net.num_classes:
        raise UsageError("training labels exceed the network's class count")
    measure = eval_data if eval_data is not None else data

    kept = _kept_layers(net, mask)
    weights = [np.where(k, w, 0.0) for k, w in zip(kept, net.weights)]
    biases = [b.copy() for b in net.biases]
    n = len(data)
    bs = cfg.train_batch_size
    lr = cfg.learning_rate

    history: list[tuple[float, float]] = []
    current = DenseNetwork(weights, biases)
    for epoch in range(cfg.epochs):
        if cfg.shuffle_each_epoch:
            order = rng.permutation(rng.derive(cfg.seed, _SHUFFLE_STREAM, epoch), n)
        else:
            order = np.arange(n)
        loss_sum = 0.0
        for start in range(0, n, bs):
            idx = order[start : start + bs]
            loss, grad_w, grad_b = _loss_and_grads_arrays(
                weights, biases, kept, data.inputs[idx], data.labels[idx]
            )
            loss_sum += loss * idx.shape[0]
            for l in range(len(weights)):
                weights[l] = np.where(kept[l], weights[l] - lr * grad_w[l], 0.0)
                biases[l] = biases[l] - lr * grad_b[l]
        current = DenseNetwork(list(weights), list(biases))
        history.append((loss_sum / n, evaluate(current, mask, measure)))
    return current, history


def evaluate(net: DenseNetwork, mask: Optional["PruneMask"], data: Dataset) -> float:
    """Fraction of argmax-correct predictions; argmax ties pick the lowest class."""
    if len(data) == 0:
        raise UsageError("cannot evaluate on an empty dataset")
    probs = forward(net, mask, data.inputs)
    predictions = probs.argmax(axis=1)
    return float(np.mean(predictions == data.labels))
