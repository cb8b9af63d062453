"""
An iterative winning-ticket search
==================================

Repeat train -> score -> prune 20% -> rewind-to-init -> retrain for eight
rounds with L1 scoring. Each round compounds the sparsity (kept fraction
0.8^round) while the rewound sub-network keeps training back to nearly
full accuracy: the lottery-ticket effect at desk scale. The record also
tracks how far the surviving weights end up from the trained dense
baseline (weight movement).
"""

import ticketlab as tl

train_data = tl.gen_synthetic(classes=4, dim=16, per_class=80, seed=5, noise=0.25)
test_data = tl.gen_synthetic(classes=4, dim=16, per_class=30, seed=88, noise=0.25)

schedule = tl.TrainConfig(epochs=8, learning_rate=0.3, train_batch_size=32, seed=0)
cfg = tl.LotteryConfig(
    arch=(16, 24, 12, 4),
    strategy="l1",
    mode="iterative",
    per_round_fraction=0.2,
    rounds=8,
    init_seed=1,
    data_seed=2,
    strategy_seed=3,
    train=schedule,
    final_train=schedule,
    experiment_id="demo-iterative",
)

record = tl.run_iterative(cfg, train_data, test_data)

print("round  pruned   accuracy  best    avg_movement")
for row in record.rows:
    print(
        f"{row.round:5d}  {row.fraction_pruned:6.3f}  {row.test_accuracy:8.4f}"
        f"  {row.best_accuracy:.4f}  {row.weight_avg_dif:.4f}"
    )

# The record flattens into the fixed CSV schema used by the CLI.
tl.emit_csv(tl.record_table([record]), "demo-iterative.csv")
print("\nwrote demo-iterative.csv")
