"""
Scoring and global pruning
==========================

Train a network, score every weight three ways (random, L1 magnitude,
Fisher), and prune the lowest-scored 60% globally. The three masks keep
the same number of weights but distribute them very differently across
layers, which the sparsity report makes visible.
"""

import ticketlab as tl

ARCH = [10, 20, 12, 4]

train_data = tl.gen_synthetic(classes=4, dim=10, per_class=60, seed=3, noise=0.2)
net = tl.init_network(ARCH, seed=1)
mask = tl.full_mask(ARCH)
trained, _ = tl.train(net, mask, train_data, tl.TrainConfig(epochs=10, seed=0))

# Score with each strategy. Fisher scores need data and report how many
# backward passes they spent; here 240 samples in batches of 40 cost 6.
scores = {
    "random": tl.score_random(mask, seed=42),
    "l1": tl.score_l1(trained, mask),
}
scores["fisher"], passes = tl.score_fisher(
    trained, mask, train_data, tl.FisherConfig(sample_count=240, fisher_batch_size=40)
)
print(f"fisher scoring used {passes} backward passes\n")

print(f"{'strategy':8s}  {'kept':>5s}  per-layer fraction pruned")
for name, score in scores.items():
    pruned = tl.global_prune(mask, score, fraction=0.6)
    report = tl.sparsity(pruned)
    per_layer = "  ".join(f"{e.fraction_pruned:.2f}" for e in report.per_layer)
    print(f"{name:8s}  {report.total_weights - report.pruned_weights:5d}  [{per_layer}]")

print("\nGlobal pruning ranks all layers jointly, so informative layers")
print("keep more of their weights than a uniform per-layer cut would.")
