"""
One-shot versus iterative pruning
=================================

One-shot pruning trains the dense network once and removes the full
target fraction in a single cut; iterative pruning compounds small cuts
with a rewind and retrain between them. At moderate sparsity the two are
near-identical; push the sparsity and iterative pulls ahead. The
per-round fraction 1 - 0.5^(1/4) makes iterative round 4 land on exactly
50% so the comparison is sparsity-matched.
"""

import ticketlab as tl

ARCH = (16, 24, 12, 4)
PER_ROUND = 1 - 0.5 ** (1 / 4)
ROUNDS = 12
HIGH = 1 - 0.5 ** (ROUNDS / 4)  # ~0.875

train_data = tl.gen_synthetic(classes=4, dim=16, per_class=80, seed=5, noise=0.3)
test_data = tl.gen_synthetic(classes=4, dim=16, per_class=30, seed=88, noise=0.3)
schedule = tl.TrainConfig(epochs=8, learning_rate=0.3, train_batch_size=32, seed=0)

common = dict(arch=ARCH, strategy="l1", init_seed=1, data_seed=2, strategy_seed=3,
              train=schedule, final_train=schedule)
iterative = tl.run_iterative(
    tl.LotteryConfig(mode="iterative", per_round_fraction=PER_ROUND, rounds=ROUNDS, **common),
    train_data, test_data,
)
one_shot = tl.run_one_shot(
    tl.LotteryConfig(mode="one_shot", one_shot_targets=(0.5, HIGH), **common),
    train_data, test_data,
)

print(f"dense baseline:        best accuracy {iterative.rows[0].best_accuracy:.4f}\n")
print(f"{'pruned':>8s}  {'iterative':>9s}  {'one-shot':>8s}")
print(f"{iterative.rows[4].fraction_pruned:8.3f}  {iterative.rows[4].best_accuracy:9.4f}"
      f"  {one_shot.rows[1].best_accuracy:8.4f}")
print(f"{iterative.rows[ROUNDS].fraction_pruned:8.3f}  {iterative.rows[ROUNDS].best_accuracy:9.4f}"
      f"  {one_shot.rows[2].best_accuracy:8.4f}")

table = tl.figure_data([iterative, one_shot], "accuracy_vs_sparsity")
tl.emit_csv(table, "demo-one-shot-vs-iterative.csv")
print("\nwrote demo-one-shot-vs-iterative.csv (long-format accuracy/sparsity series)")
