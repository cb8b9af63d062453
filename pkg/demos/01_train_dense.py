"""
Training a dense classifier
===========================

Build a seeded network, fit it on synthetic Gaussian blobs with plain
minibatch SGD, and watch the per-epoch history. Everything is
deterministic: rerunning this script reproduces the numbers exactly.
"""

import ticketlab as tl

# Three blob classes in 8 dimensions, 150 training and 60 test points.
train_data = tl.gen_synthetic(classes=3, dim=8, per_class=50, seed=7, noise=0.25)
test_data = tl.gen_synthetic(classes=3, dim=8, per_class=20, seed=99, noise=0.25)

# A [8, 16, 3] network; weights ~ uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)).
net = tl.init_network([8, 16, 3], seed=1)
mask = tl.full_mask([8, 16, 3])

cfg = tl.TrainConfig(epochs=15, learning_rate=0.2, train_batch_size=32, seed=0)
trained, history = tl.train(net, mask, train_data, cfg, eval_data=test_data)

print("epoch  train_loss  test_accuracy")
for epoch, (loss, accuracy) in enumerate(history, start=1):
    print(f"{epoch:5d}  {loss:10.4f}  {accuracy:13.4f}")

print(f"\nfinal test accuracy: {tl.evaluate(trained, mask, test_data):.4f}")
print(f"train accuracy:      {tl.evaluate(trained, mask, train_data):.4f}")
