"""Command-line surface.

Commands: `train` (fit a dense classifier), `lottery` (run an experiment
spec), `report` (assemble figure data from record CSVs), `inspect`
(sparsity and connectivity of a checkpoint), `selftest` (invariant
battery). Exit codes: 0 success, 1 usage error, 2 data/format error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import DataFormatError, NumericalError, UsageError
from .checkpoint import (
    CheckpointState,
    config_hash,
    latest_round_path,
    load_checkpoint,
    save_checkpoint,
)
from .config import build_datasets, load_spec, seed_configs
from .data import gen_synthetic, load_idx
from .lottery import LotteryConfig, run_iterative, run_one_shot
from .masks import full_mask, sparsity
from .metrics import FIGURES, connectivity_report, figure_data
from .nn import TrainConfig, check_layer_sizes, init_network, train
from .results import emit_csv, read_records_csv, record_table
from .selftest import run_selftest


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through our exit-code mapping."""

    def error(self, message):
        raise UsageError(message)


def _parse_arch(text: str) -> tuple[int, ...]:
    try:
        return check_layer_sizes([int(p) for p in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad architecture {text!r}: {exc}") from exc


def _parse_synthetic(text: str):
    parts = text.split(",")
    if len(parts) < 3 or len(parts) > 5:
        raise UsageError("--synthetic takes CLASSES,DIM,PER_CLASS[,NOISE[,SEED]]")
    classes, dim, per_class = (int(p) for p in parts[:3])
    noise = float(parts[3]) if len(parts) > 3 else 0.1
    seed = int(parts[4]) if len(parts) > 4 else 0
    return gen_synthetic(classes, dim, per_class, seed, noise=noise)


def _cmd_train(args) -> int:
    arch = _parse_arch(args.arch)
    if args.synthetic is not None:
        if args.images or args.labels:
            raise UsageError("give either --synthetic or --images/--labels, not both")
        dataset = _parse_synthetic(args.synthetic)
    else:
        if not (args.images and args.labels):
            raise UsageError("need --images and --labels (or --synthetic)")
        dataset = load_idx(args.images, args.labels)
    eval_data = None
    if args.test_images and args.test_labels:
        eval_data = load_idx(args.test_images, args.test_labels)

    cfg = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        train_batch_size=args.batch_size,
        seed=args.seed,
        shuffle_each_epoch=not args.no_shuffle,
    )
    net = init_network(arch, args.seed)
    mask = full_mask(arch)
    trained, history = train(net, mask, dataset, cfg, eval_data=eval_data)
    for epoch, (loss, acc) in enumerate(history):
        print(f"epoch {epoch + 1:3d}  loss {loss:.6f}  accuracy {acc:.4f}")
    print(f"final accuracy {history[-1][1]:.4f} (best {max(a for _, a in history):.4f})")

    if args.save:
        state = CheckpointState(
            arch=arch,
            round_index=0,
            config_hash=config_hash(cfg),
            initial=net,
            baseline=trained,
            mask=mask,
            trained=trained,
            rows=[],
        )
        save_checkpoint(state, args.save)
        print(f"checkpoint written to {args.save}")
    return 0


def _run_one(cfg: LotteryConfig, spec, train_data, test_data, resume: bool):
    if cfg.mode == "one_shot":
        return run_one_shot(cfg, train_data, test_data)
    checkpoint_dir = None
    resume_from = None
    if spec.checkpoint:
        checkpoint_dir = (
            Path(spec.output_dir) / f"checkpoints-{cfg.experiment_id}-seed{cfg.init_seed}"
        )
        if resume:
            resume_from = latest_round_path(checkpoint_dir)
    return run_iterative(
        cfg, train_data, test_data, checkpoint_dir=checkpoint_dir, resume_from=resume_from
    )


def _cmd_lottery(args) -> int:
    spec = load_spec(args.config)
    train_data, test_data = build_datasets(spec)
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records = []
    for cfg in seed_configs(spec):
        print(f"running {cfg.experiment_id} (seed {cfg.init_seed}, {cfg.strategy}/{cfg.mode})")
        record = _run_one(cfg, spec, train_data, test_data, args.resume)
        for row in record.rows:
            print(
                f"  round {row.round:3d}  pruned {row.fraction_pruned:7.4f}  "
                f"accuracy {row.test_accuracy:.4f}  best {row.best_accuracy:.4f}"
            )
        records.append(record)

    out_path = out_dir / f"{spec.lottery.experiment_id}.csv"
    emit_csv(record_table(records), out_path)
    print(f"records written to {out_path}")
    return 0


def _apply_per_file_values(records_by_file, values_text, attr, caster, flag):
    if values_text is None:
        return
    values = values_text.split(",")
    if len(values) != len(records_by_file):
        raise UsageError(f"{flag} needs one value per input CSV ({len(records_by_file)} given)")
    for recs, value in zip(records_by_file, values):
        for rec in recs:
            setattr(rec, attr, caster(value))


def _cmd_report(args) -> int:
    records_by_file = [read_records_csv(p) for p in args.inputs]
    _apply_per_file_values(records_by_file, args.labels, "label", str, "--labels")
    _apply_per_file_values(
        records_by_file, args.batch_sizes, "fisher_batch_size", int, "--batch-sizes"
    )
    records = [rec for recs in records_by_file for rec in recs]
    table = figure_data(records, args.figure)
    emit_csv(table, args.out)
    print(f"{args.figure}: {len(table.rows)} rows written to {args.out}")
    return 0


def _cmd_inspect(args) -> int:
    state = load_checkpoint(args.checkpoint)
    report = sparsity(state.mask)
    print(f"architecture      {'-'.join(str(s) for s in state.arch)}")
    print(f"round index       {state.round_index}")
    print(f"config hash       {state.config_hash}")
    print(
        f"sparsity          {report.pruned_weights}/{report.total_weights} pruned "
        f"({report.fraction_pruned:.4%})"
    )
    for l, layer in enumerate(report.per_layer):
        print(f"  layer {l}: {layer.pruned}/{layer.total} pruned ({layer.fraction_pruned:.4%})")
    conn = connectivity_report(state.mask)
    print("incoming connections per unit (min/mean/max):")
    for l, layer in enumerate(conn.per_layer):
        print(f"  layer {l}: {layer.min}/{layer.mean:.2f}/{layer.max}")
    return 0


def _cmd_selftest(args) -> int:
    return 0 if run_selftest() else 3


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ticketlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a dense classifier")
    p.add_argument("--arch", required=True, help="comma-separated layer sizes, e.g. 784,300,100,10")
    p.add_argument("--images", help="IDX image file")
    p.add_argument("--labels", help="IDX label file")
    p.add_argument("--test-images", help="IDX image file for accuracy reporting")
    p.add_argument("--test-labels", help="IDX label file for accuracy reporting")
    p.add_argument("--synthetic", help="CLASSES,DIM,PER_CLASS[,NOISE[,SEED]] blob dataset")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shuffle", action="store_true", help="fixed batch order every epoch")
    p.add_argument("--save", help="write a checkpoint of the trained network")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("lottery", help="run an experiment spec file")
    p.add_argument("--config", required=True, help="JSON experiment spec")
    p.add_argument(
        "--resume",
        action="store_true",
        help="continue iterative runs from their latest checkpoint (needs checkpoint: true)",
    )
    p.set_defaults(func=_cmd_lottery)

    p = sub.add_parser("report", help="assemble figure data from record CSVs")
    p.add_argument("--figure", required=True, choices=FIGURES)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("inputs", nargs="+", help="record CSVs produced by `lottery`")
    p.add_argument("--labels", help="comma-separated series/width label per input CSV")
    p.add_argument(
        "--batch-sizes",
        help="comma-separated fisher batch size per input CSV (for batch_comparison)",
    )
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("inspect", help="sparsity and connectivity of a checkpoint")
    p.add_argument("checkpoint", help="checkpoint JSON file")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("selftest", help="run the invariant battery")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
