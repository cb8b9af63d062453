"""Experiment spec files: validation, dataset construction, seed expansion.

A spec is a single JSON document holding the full experiment config, the
dataset source (IDX file paths or a synthetic recipe), the output
directory, and an optional seed list. Unknown keys anywhere in the tree
are hard errors: a silently ignored typo would corrupt an experiment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .errors import DataFormatError, UsageError
from . import rng
from .data import gen_synthetic, load_idx
from .lottery import LotteryConfig
from .nn import Dataset, TrainConfig
from .strategies import FisherConfig

# Stream tag distinguishing a synthetic test set from its training set.
_TEST_SPLIT_STREAM = 5

_TOP_KEYS = {
    "experiment_id",
    "arch",
    "strategy",
    "mode",
    "per_round_fraction",
    "rounds",
    "init_seed",
    "data_seed",
    "strategy_seed",
    "train",
    "final_train",
    "fisher",
    "one_shot_targets",
    "dataset",
    "output_dir",
    "seeds",
    "checkpoint",
}
_TRAIN_KEYS = {"epochs", "learning_rate", "train_batch_size", "seed", "shuffle_each_epoch"}
_FISHER_KEYS = {"sample_count", "fisher_batch_size"}
_IDX_KEYS = {"train_images", "train_labels", "test_images", "test_labels"}
_SYNTHETIC_KEYS = {"classes", "dim", "per_class", "test_per_class", "noise", "seed"}


@dataclass(frozen=True)
class IdxSource:
    train_images: str
    train_labels: str
    test_images: str
    test_labels: str


@dataclass(frozen=True)
class SyntheticSource:
    classes: int
    dim: int
    per_class: int
    test_per_class: int
    seed: int = 0
    noise: float = 0.1


@dataclass(frozen=True)
class ExperimentSpec:
    lottery: LotteryConfig
    dataset: IdxSource | SyntheticSource
    output_dir: str
    seeds: Optional[tuple[int, ...]] = None
    checkpoint: bool = False


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise UsageError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _train_config(obj, where: str) -> TrainConfig:
    if not isinstance(obj, dict):
        raise UsageError(f"{where} must be an object")
    _reject_unknown(obj, _TRAIN_KEYS, where)
    return TrainConfig(**obj)


def _dataset_source(obj) -> IdxSource | SyntheticSource:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise UsageError("dataset must be an object with exactly one of 'idx' or 'synthetic'")
    kind, body = next(iter(obj.items()))
    if not isinstance(body, dict):
        raise UsageError(f"dataset.{kind} must be an object")
    if kind == "idx":
        _reject_unknown(body, _IDX_KEYS, "dataset.idx")
        missing = sorted(_IDX_KEYS - set(body))
        if missing:
            raise UsageError(f"dataset.idx is missing: {', '.join(missing)}")
        return IdxSource(**body)
    if kind == "synthetic":
        _reject_unknown(body, _SYNTHETIC_KEYS, "dataset.synthetic")
        return SyntheticSource(**body)
    raise UsageError(f"dataset kind must be 'idx' or 'synthetic', got {kind!r}")


def _resolve_idx_paths(src: IdxSource, base_dir: Path) -> IdxSource:
    def fix(p: str) -> str:
        return p if Path(p).is_absolute() else str(base_dir / p)

    return IdxSource(
        fix(src.train_images), fix(src.train_labels), fix(src.test_images), fix(src.test_labels)
    )


def parse_spec(obj: dict, base_dir: Optional[Path] = None) -> ExperimentSpec:
    """Validate a parsed JSON tree into an ExperimentSpec."""
    if not isinstance(obj, dict):
        raise UsageError("spec must be a JSON object")
    _reject_unknown(obj, _TOP_KEYS, "spec")
    for key in ("arch", "strategy", "mode", "dataset"):
        if key not in obj:
            raise UsageError(f"spec is missing required key {key!r}")

    lottery_kwargs = {
        "arch": tuple(obj["arch"]),
        "strategy": obj["strategy"],
        "mode": obj["mode"],
    }
    for key in ("per_round_fraction", "rounds", "init_seed", "data_seed", "strategy_seed",
                "experiment_id"):
        if key in obj:
            lottery_kwargs[key] = obj[key]
    if "train" in obj:
        lottery_kwargs["train"] = _train_config(obj["train"], "train")
    if "final_train" in obj:
        lottery_kwargs["final_train"] = _train_config(obj["final_train"], "final_train")
    elif "train" in obj:
        lottery_kwargs["final_train"] = lottery_kwargs["train"]
    if "fisher" in obj:
        _reject_unknown(obj["fisher"], _FISHER_KEYS, "fisher")
        lottery_kwargs["fisher"] = FisherConfig(**obj["fisher"])
    if "one_shot_targets" in obj:
        lottery_kwargs["one_shot_targets"] = tuple(obj["one_shot_targets"])

    dataset = _dataset_source(obj["dataset"])
    if isinstance(dataset, IdxSource) and base_dir is not None:
        dataset = _resolve_idx_paths(dataset, base_dir)

    seeds = obj.get("seeds")
    if seeds is not None:
        if not isinstance(seeds, list) or not seeds:
            raise UsageError("seeds must be a non-empty list of integers")
        seeds = tuple(int(s) for s in seeds)

    return ExperimentSpec(
        lottery=LotteryConfig(**lottery_kwargs),
        dataset=dataset,
        output_dir=obj.get("output_dir", "results"),
        seeds=seeds,
        checkpoint=bool(obj.get("checkpoint", False)),
    )


def load_spec(path) -> ExperimentSpec:
    """Read and validate a spec file."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"spec {path} is not valid JSON: {exc}") from exc
    try:
        return parse_spec(obj, base_dir=path.parent)
    except TypeError as exc:
        raise UsageError(f"spec {path}: {exc}") from exc


def build_datasets(spec: ExperimentSpec) -> tuple[Dataset, Dataset]:
    """Materialize (train, test) datasets from the spec's source."""
    src = spec.dataset
    if isinstance(src, IdxSource):
        return (
            load_idx(src.train_images, src.train_labels),
            load_idx(src.test_images, src.test_labels),
        )
    train = gen_synthetic(src.classes, src.dim, src.per_class, src.seed, noise=src.noise)
    test = gen_synthetic(
        src.classes,
        src.dim,
        src.test_per_class,
        rng.derive(src.seed, _TEST_SPLIT_STREAM),
        noise=src.noise,
    )
    return train, test


def seed_configs(spec: ExperimentSpec) -> list[LotteryConfig]:
    """One LotteryConfig per requested seed.

    Each seed s replaces the init, strategy, and training-shuffle seeds;
    data_seed stays fixed so every seed sees the same data presentation
    and Fisher subset.
    """
    base = spec.lottery
    if spec.seeds is None:
        return [base]
    return [
        replace(
            base,
            init_seed=s,
            strategy_seed=s,
            train=replace(base.train, seed=s),
            final_train=replace(base.final_train, seed=s),
        )
        for s in spec.seeds
    ]
