"""Fast invariant battery behind the `selftest` CLI command.

Each check is a tiny deterministic experiment exercising one contract:
gradient exactness against finite differences, Fisher batching against a
per-sample loop, mask algebra, movement summation against an element
loop, IDX round trips. The whole battery runs in a few seconds.
"""

from __future__ import annotations

import math
import tempfile
from pathlib import Path

import numpy as np

from . import rng
from .data import gen_synthetic, load_idx, write_idx
from .masks import apply_mask, full_mask, rewind, sparsity
from .metrics import weight_movement
from .nn import Dataset, TrainConfig, forward, init_network, loss_and_grads, train
from .strategies import FisherConfig, global_prune, score_fisher, score_l1, score_random


def _fd_gradient(net, mask, batch, layer, i, j, h=1e-5):
    """Central finite difference of the batch loss in one weight coordinate."""
    bumped = net.copy()
    bumped.weights[layer][i, j] += h
    up, _ = loss_and_grads(bumped, mask, batch)
    bumped.weights[layer][i, j] -= 2 * h
    down, _ = loss_and_grads(bumped, mask, batch)
    return (up - down) / (2 * h)


def check_gradients() -> bool:
    net = init_network([3, 4, 2], seed=11)
    mask = full_mask([3, 4, 2])
    batch = Dataset(rng.normals(21, 5 * 3).reshape(5, 3), np.array([0, 1, 0, 1, 1]))
    _, grads = loss_and_grads(net, mask, batch)
    for l, g in enumerate(grads.weights):
        for i in range(g.shape[0]):
            for j in range(g.shape[1]):
                fd = _fd_gradient(net, mask, batch, l, i, j)
                if abs(g[i, j] - fd) / max(abs(g[i, j]), abs(fd), 1e-8) >= 1e-4:
                    return False
    return True


def check_softmax_rows() -> bool:
    net = init_network([6, 5, 4], seed=3)
    probs = forward(net, None, rng.normals(5, 8 * 6).reshape(8, 6))
    return (
        bool(np.all(np.abs(probs.sum(axis=1) - 1.0) <= 1e-9))
        and probs.min() >= 0.0
        and probs.max() <= 1.0
    )


def check_masked_freeze() -> bool:
    arch = [4, 6, 3]
    net = init_network(arch, seed=5)
    mask = full_mask(arch)
    mask.layers[0][::2, ::2] = 0
    mask.layers[1][1, :] = 0
    data = gen_synthetic(3, 4, 30, seed=9)
    trained, _ = train(net, mask, data, TrainConfig(epochs=2, seed=4))
    return all(
        np.all(w[~m.astype(bool)] == 0.0) for w, m in zip(trained.weights, mask.layers)
    )


def check_fisher_oracle() -> bool:
    arch = [4, 5, 3]
    net = init_network(arch, seed=7)
    mask = full_mask(arch)
    data = gen_synthetic(3, 4, 8, seed=13)
    scores, passes = score_fisher(net, mask, data, FisherConfig(len(data), 1))
    if passes != len(data):
        return False
    acc = [np.zeros_like(w) for w in net.weights]
    for n in range(len(data)):
        _, g = loss_and_grads(net, mask, Dataset(data.inputs[n : n + 1], data.labels[n : n + 1]))
        for l in range(len(acc)):
            acc[l] += g.weights[l] ** 2
    for l, w in enumerate(net.weights):
        expected = w * w * acc[l] / (2 * len(data))
        if not np.allclose(scores.layers[l], expected, rtol=1e-12, atol=0):
            return False
    return True


def check_global_prune() -> bool:
    mask = full_mask([4, 3, 2])
    scores = score_random(mask, seed=17)
    pruned = global_prune(mask, scores, 0.25)
    kept_before, kept_after = mask.kept_count(), pruned.kept_count()
    if kept_before - kept_after != math.floor(0.25 * kept_before + 0.5):
        return False
    deeper = global_prune(pruned, score_random(pruned, seed=18), 0.5)
    return all(np.all(d <= p) for d, p in zip(deeper.layers, pruned.layers))


def check_mask_algebra() -> bool:
    arch = [3, 4, 2]
    net = init_network(arch, seed=19)
    mask = full_mask(arch)
    mask.layers[0][0, :] = 0
    once = apply_mask(net, mask)
    twice = apply_mask(once, mask)
    idempotent = all(np.array_equal(a, b) for a, b in zip(once.weights, twice.weights))
    trained = init_network(arch, seed=20)
    rewound = rewind(trained, net, mask)
    fidelity = all(
        np.array_equal(r[m.astype(bool)], w[m.astype(bool)])
        and np.all(r[~m.astype(bool)] == 0.0)
        for r, w, m in zip(rewound.weights, net.weights, mask.layers)
    )
    return idempotent and fidelity


def check_movement_oracle() -> bool:
    arch = [3, 4, 2]
    a, b = init_network(arch, seed=23), init_network(arch, seed=29)
    mask = full_mask(arch)
    mask.layers[1][0, 1] = 0
    report = weight_movement(a, b, mask)
    acc = 0.0
    count = 0
    for wa, wb, m in zip(a.weights, b.weights, mask.layers):
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                if m[i, j]:
                    acc += abs(wa[i, j] - wb[i, j])
                    count += 1
    return report.weight_abs_dif == acc and report.unpruned_count == count


def check_idx_roundtrip() -> bool:
    labels = np.arange(6, dtype=np.int64) % 3
    inputs = (np.arange(6 * 4, dtype=np.float64).reshape(6, 4) % 256) / 255.0
    ds = Dataset(inputs, labels)
    with tempfile.TemporaryDirectory() as tmp:
        imgs, labs = Path(tmp) / "i.idx", Path(tmp) / "l.idx"
        write_idx(ds, imgs, labs, rows=2, cols=2)
        back = load_idx(imgs, labs)
    return np.array_equal(back.inputs, ds.inputs) and np.array_equal(back.labels, ds.labels)


def check_l1_scores() -> bool:
    net = init_network([2, 3], seed=31)
    mask = full_mask([2, 3])
    scores = score_l1(net, mask)
    return np.array_equal(scores.layers[0], np.abs(net.weights[0]))


def check_sparsity_compounding() -> bool:
    mask = full_mask([20, 10, 5])
    for r in range(5):
        mask = global_prune(mask, score_random(mask, seed=100 + r), 0.2)
    expected = 1.0 - 0.8**5
    return abs(sparsity(mask).fraction_pruned - expected) <= 5 / mask.total_count()


CHECKS = (
    ("gradients match central finite differences", check_gradients),
    ("softmax rows sum to one", check_softmax_rows),
    ("masked weights stay zero through training", check_masked_freeze),
    ("fisher batch size 1 matches per-sample loop", check_fisher_oracle),
    ("global prune removes the exact count, masks shrink monotonically", check_global_prune),
    ("mask application is idempotent, rewind restores kept weights", check_mask_algebra),
    ("weight movement matches an element loop", check_movement_oracle),
    ("idx files round-trip", check_idx_roundtrip),
    ("l1 scores are absolute weights", check_l1_scores),
    ("repeated 20% pruning compounds to 1 - 0.8^n", check_sparsity_compounding),
)


def run_selftest(println=print) -> bool:
    """Run every check; prints one PASS/FAIL line each, returns overall success."""
    ok = True
    for name, fn in CHECKS:
        passed = fn()
        ok = ok and passed
        println(f"[{'PASS' if passed else 'FAIL'}] {name}")
    return ok
