"""One-shot and iterative winning-ticket experiments.

Iterative mode repeats train -> score -> prune -> rewind-to-init ->
retrain, compounding the per-round pruning fraction; the last round's
retraining uses the dedicated final schedule and its best epoch is the
headline result. One-shot mode trains the dense network once, then prunes
each requested target fraction in a single step from that same trained
network, rewinds, and retrains.

Every round records sparsity, final-epoch and best-epoch test accuracy,
train loss, movement relative to the round-0 trained baseline, Fisher
backward-pass counts, and wall-clock seconds. Identical configs (and
datasets) reproduce identical records apart from the seconds column.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NumericalError, TicketLabError, UsageError
from . import rng
from .masks import PruneMask, apply_mask, full_mask, rewind, sparsity
from .metrics import MovementReport, weight_movement
from .nn import Dataset, DenseNetwork, TrainConfig, check_layer_sizes, init_network, train
from .strategies import (
    FisherConfig,
    PruneScore,
    global_prune,
    score_fisher,
    score_l1,
    score_random,
)

STRATEGIES = ("random", "l1", "fisher")
MODES = ("one_shot", "iterative")

# Stream tag for the one-time presentation-order shuffle of the training set.
_DATA_STREAM = 6


@dataclass(frozen=True)
class LotteryConfig:
    """Everything needed to reproduce one experiment bit-for-bit."""

    arch: tuple[int, ...]
    strategy: str
    mode: str
    per_round_fraction: float = 0.2
    rounds: int = 10
    init_seed: int = 0
    data_seed: int = 0
    strategy_seed: int = 0
    train: TrainConfig = TrainConfig()
    final_train: TrainConfig = TrainConfig()
    fisher: Optional[FisherConfig] = None
    one_shot_targets: Optional[tuple[float, ...]] = None
    experiment_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "arch", check_layer_sizes(self.arch))
        if self.strategy not in STRATEGIES:
            raise UsageError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 < self.per_round_fraction < 1.0:
            raise UsageError(
                f"per_round_fraction must be in (0, 1), got {self.per_round_fraction}"
            )
        if self.rounds < 1:
            raise UsageError(f"rounds must be >= 1, got {self.rounds}")
        if self.strategy == "fisher" and self.fisher is None:
            raise UsageError("strategy 'fisher' needs a FisherConfig")
        if self.mode == "one_shot":
            if not self.one_shot_targets:
                raise UsageError("one_shot mode needs one_shot_targets")
            targets = tuple(sorted(float(t) for t in self.one_shot_targets))
            if any(not 0.0 <= t <= 1.0 for t in targets):
                raise UsageError(f"one_shot_targets must lie in [0, 1], got {targets}")
            object.__setattr__(self, "one_shot_targets", targets)
        if not self.experiment_id:
            object.__setattr__(
                self, "experiment_id", f"{self.strategy}-{self.mode}-seed{self.init_seed}"
            )


@dataclass(frozen=True)
class RoundRow:
    """One recorded round (or one-shot target)."""

    round: int
    fraction_pruned: float
    test_accuracy: float
    best_accuracy: float
    train_loss: float
    weight_abs_dif: float
    weight_avg_dif: float
    backward_passes: int
    seconds: float


@dataclass(eq=False)
class ExperimentRecord:
    """All rows of one experiment plus the metadata the figures need."""

    experiment_id: str
    method: str
    mode: str
    seed: int
    arch: Optional[tuple[int, ...]]
    fisher_batch_size: Optional[int]
    rows: list[RoundRow]
    label: Optional[str] = None


RoundHook = Callable[[int, PruneMask, DenseNetwork, DenseNetwork], None]


def _ensure_finite(net: DenseNetwork, context: str) -> None:
    if not net.all_finite():
        raise NumericalError(f"non-finite weights after {context}; aborting experiment")


def _presentation_order(cfg: LotteryConfig, train_data: Dataset) -> Dataset:
    """One-time seeded shuffle fixing both batch content and the Fisher subset."""
    order = rng.permutation(rng.derive(cfg.data_seed, _DATA_STREAM), len(train_data))
    return train_data.take(order)


def _compute_scores(
    cfg: LotteryConfig,
    trained: DenseNetwork,
    mask: PruneMask,
    fisher_set: Dataset,
    round_index: int,
) -> tuple[PruneScore, int]:
    """Dispatch to the configured scorer; returns (scores, backward passes)."""
    if cfg.strategy == "random":
        # A fresh seed each round; reusing one would re-rank the same draws.
        return score_random(mask, cfg.strategy_seed + round_index), 0
    if cfg.strategy == "l1":
        return score_l1(trained, mask), 0
    assert cfg.fisher is not None
    return score_fisher(trained, mask, fisher_set, cfg.fisher)


def _prune_step(mask: PruneMask, scores: PruneScore, fraction: float) -> PruneMask:
    """Globally prune and verify the kept-set only ever shrinks."""
    new_mask = global_prune(mask, scores, fraction)
    for l, (old, new) in enumerate(zip(mask.layers, new_mask.layers)):
        if np.any(new > old):
            raise TicketLabError(f"mask monotonicity violated at layer {l}")
    return new_mask


def _round_row(
    round_index: int,
    mask: PruneMask,
    history: list[tuple[float, float]],
    baseline: DenseNetwork,
    trained: DenseNetwork,
    backward_passes: int,
    seconds: float,
) -> RoundRow:
    if mask.kept_count() == 0:
        # Everything pruned: the movement sum is empty and the average undefined.
        movement = MovementReport(0.0, 0.0, 0)
    else:
        movement = weight_movement(baseline, trained, mask)
    return RoundRow(
        round=round_index,
        fraction_pruned=sparsity(mask).fraction_pruned,
        test_accuracy=history[-1][1],
        best_accuracy=max(acc for _, acc in history),
        train_loss=history[-1][0],
        weight_abs_dif=movement.weight_abs_dif,
        weight_avg_dif=movement.weight_avg_dif,
        backward_passes=backward_passes,
        seconds=seconds,
    )


def _validate_fisher_budget(cfg: LotteryConfig, train_data: Dataset) -> None:
    if cfg.strategy == "fisher" and cfg.fisher.sample_count > len(train_data):
        raise UsageError(
            f"fisher sample_count {cfg.fisher.sample_count} exceeds the "
            f"{len(train_data)} available training rows"
        )


def _make_record(cfg: LotteryConfig, rows: list[RoundRow]) -> ExperimentRecord:
    return ExperimentRecord(
        experiment_id=cfg.experiment_id,
        method=cfg.strategy,
        mode=cfg.mode,
        seed=cfg.init_seed,
        arch=cfg.arch,
        fisher_batch_size=cfg.fisher.fisher_batch_size if cfg.fisher else None,
        rows=rows,
    )


def run_iterative(
    cfg: LotteryConfig,
    train_data: Dataset,
    test_data: Dataset,
    checkpoint_dir=None,
    resume_from=None,
    on_round: Optional[RoundHook] = None,
) -> ExperimentRecord:
    """Run (or resume) an iterative pruning experiment.

    Round 0 trains the dense network and becomes the movement baseline;
    each later round scores the previous round's trained network, prunes
    the per-round fraction globally, rewinds kept weights to their
    round-0 initialization, and retrains (the last round with the
    final-training schedule). `on_round(index, mask, start_net, trained)`
    fires after every round. With `checkpoint_dir`, a checkpoint is
    written per round; `resume_from` continues from one, bit-identically
    to an uninterrupted run.
    """
    from . import checkpoint as ckpt

    if cfg.mode != "iterative":
        raise UsageError(f"run_iterative needs mode='iterative', got {cfg.mode!r}")
    _validate_fisher_budget(cfg, train_data)
    presentation = _presentation_order(cfg, train_data)

    if resume_from is not None:
        state = ckpt.load_checkpoint(resume_from, expected_config_hash=ckpt.config_hash(cfg))
        initial, baseline = state.initial, state.baseline
        mask, trained = state.mask, state.trained
        rows = list(state.rows)
        first_round = state.round_index + 1
        if baseline is None:
            raise UsageError("checkpoint lacks the round-0 baseline; cannot resume")
    else:
        initial = init_network(cfg.arch, cfg.init_seed)
        mask = full_mask(cfg.arch)
        start = time.perf_counter()
        masked_init = apply_mask(initial, mask)
        trained, history = train(masked_init, mask, presentation, cfg.train, eval_data=test_data)
        _ensure_finite(trained, "round 0 training")
        baseline = trained
        rows = [
            _round_row(0, mask, history, baseline, trained, 0, time.perf_counter() - start)
        ]
        if on_round is not None:
            on_round(0, mask, masked_init, trained)
        if checkpoint_dir is not None:
            ckpt.save_round(checkpoint_dir, cfg, 0, initial, baseline, mask, trained, rows)
        first_round = 1

    for r in range(first_round, cfg.rounds + 1):
        start = time.perf_counter()
        scores, passes = _compute_scores(cfg, trained, mask, presentation, r)
        mask = _prune_step(mask, scores, cfg.per_round_fraction)
        start_net = rewind(trained, initial, mask)
        schedule = cfg.final_train if r == cfg.rounds else cfg.train
        trained, history = train(start_net, mask, presentation, schedule, eval_data=test_data)
        _ensure_finite(trained, f"round {r} training")
        rows.append(
            _round_row(r, mask, history, baseline, trained, passes, time.perf_counter() - start)
        )
        if on_round is not None:
            on_round(r, mask, start_net, trained)
        if checkpoint_dir is not None:
            ckpt.save_round(checkpoint_dir, cfg, r, initial, baseline, mask, trained, rows)

    return _make_record(cfg, rows)


def run_one_shot(
    cfg: LotteryConfig,
    train_data: Dataset,
    test_data: Dataset,
    on_round: Optional[RoundHook] = None,
) -> ExperimentRecord:
    """Run a one-shot pruning sweep.

    The dense network is trained exactly once; every target fraction is
    pruned in a single step from that same trained network (scored once,
    since scores do not depend on the fraction), rewound, and retrained
    with the final-training schedule. Targets are processed in ascending
    order, one row each after the round-0 baseline row.
    """
    if cfg.mode != "one_shot":
        raise UsageError(f"run_one_shot needs mode='one_shot', got {cfg.mode!r}")
    _validate_fisher_budget(cfg, train_data)
    presentation = _presentation_order(cfg, train_data)

    initial = init_network(cfg.arch, cfg.init_seed)
    dense_mask = full_mask(cfg.arch)
    start = time.perf_counter()
    masked_init = apply_mask(initial, dense_mask)
    trained, history = train(masked_init, dense_mask, presentation, cfg.train, eval_data=test_data)
    _ensure_finite(trained, "dense training")
    baseline = trained
    rows = [
        _round_row(0, dense_mask, history, baseline, trained, 0, time.perf_counter() - start)
    ]
    if on_round is not None:
        on_round(0, dense_mask, masked_init, trained)

    scores, passes = _compute_scores(cfg, trained, dense_mask, presentation, 1)
    for i, target in enumerate(cfg.one_shot_targets, start=1):
        start = time.perf_counter()
        mask = _prune_step(dense_mask, scores, target)
        start_net = rewind(trained, initial, mask)
        retrained, hist = train(start_net, mask, presentation, cfg.final_train, eval_data=test_data)
        _ensure_finite(retrained, f"target {target} training")
        rows.append(
            _round_row(i, mask, hist, baseline, retrained, passes, time.perf_counter() - start)
        )
        if on_round is not None:
            on_round(i, mask, start_net, retrained)

    return _make_record(cfg, rows)
