"""
Over-pruning and the bottleneck effect
======================================

Compound 20% pruning far past the useful range (15 rounds, ~96.5% of
weights gone) with random versus L1 scoring. Random pruning starves
output units of incoming connections until the network cannot route
information anymore and accuracy collapses toward chance; L1 keeps the
high-magnitude paths alive. The connectivity report shows the bottleneck
directly.
"""

import ticketlab as tl

ARCH = (24, 32, 16, 4)
ROUNDS = 15

train_data = tl.gen_synthetic(classes=4, dim=24, per_class=120, seed=11, noise=0.2)
test_data = tl.gen_synthetic(classes=4, dim=24, per_class=40, seed=92, noise=0.2)
schedule = tl.TrainConfig(epochs=6, learning_rate=0.3, train_batch_size=32, seed=0)

for strategy in ("random", "l1"):
    final_masks = {}
    cfg = tl.LotteryConfig(
        arch=ARCH, strategy=strategy, mode="iterative",
        per_round_fraction=0.2, rounds=ROUNDS,
        init_seed=1, data_seed=2, strategy_seed=3,
        train=schedule, final_train=schedule,
    )
    record = tl.run_iterative(
        cfg, train_data, test_data,
        on_round=lambda r, mask, s, t: final_masks.__setitem__(r, mask),
    )
    last = record.rows[-1]
    conn = tl.connectivity_report(final_masks[ROUNDS])
    print(f"{strategy}: {last.fraction_pruned:.3f} pruned, accuracy {last.test_accuracy:.4f}")
    for l, layer in enumerate(conn.per_layer):
        print(f"  layer {l} incoming per unit: min {layer.min}, mean {layer.mean:.1f}, max {layer.max}")
    print()
