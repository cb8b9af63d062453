import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ticketlab import (
    Dataset,
    FisherConfig,
    PruneMask,
    UsageError,
    full_mask,
    global_prune,
    init_network,
    loss_and_grads,
    removal_count,
    score_fisher,
    score_l1,
    score_random,
)
from ticketlab.nn import DenseNetwork
from ticketlab.strategies import PruneScore, _fisher_combine


def one_layer_net(values):
    w = np.asarray(values, dtype=np.float64)
    return DenseNetwork([w], [np.zeros(w.shape[0])])


class TestScoreL1:
    def test_absolute_values(self):
        net = one_layer_net([[0.5, -1.2, 0.1]])
        scores = score_l1(net, full_mask([3, 1]))
        assert np.array_equal(scores.layers[0], np.array([[0.5, 1.2, 0.1]]))

    def test_selection_invariant_under_positive_scaling(self):
        arch = (5, 4, 3)
        net = init_network(arch, seed=3)
        mask = full_mask(arch)
        scaled = DenseNetwork([w * 7.5 for w in net.weights], [b.copy() for b in net.biases])
        a = global_prune(mask, score_l1(net, mask), 0.4)
        b = global_prune(mask, score_l1(scaled, mask), 0.4)
        assert all(np.array_equal(x, y) for x, y in zip(a.layers, b.layers))

    def test_zero_weight_scores_zero_and_goes_first(self):
        net = one_layer_net([[0.0, 0.5, -0.5]])
        mask = full_mask([3, 1])
        scores = score_l1(net, mask)
        assert scores.layers[0][0, 0] == 0.0
        pruned = global_prune(mask, scores, 1 / 3)
        assert np.array_equal(pruned.layers[0], np.array([[0, 1, 1]], dtype=np.uint8))

    def test_pruned_positions_excluded(self):
        net = one_layer_net([[1.0, 2.0]])
        mask = PruneMask([np.array([[1, 0]], dtype=np.uint8)])
        scores = score_l1(net, mask)
        assert math.isnan(scores.layers[0][0, 1])


class TestScoreRandom:
    def test_deterministic(self):
        mask = full_mask([4, 3, 2])
        a = score_random(mask, seed=5)
        b = score_random(mask, seed=5)
        assert all(np.array_equal(x, y, equal_nan=True) for x, y in zip(a.layers, b.layers))

    def test_prune_counts_uniform_over_layers(self):
        """Chi-square over 1000 seeds on a 2-layer toy mask: removals land on
        layers in proportion to their size (12 vs 6 positions, 9 removed)."""
        arch = (4, 3, 2)
        mask = full_mask(arch)
        sizes = np.array([12, 6])
        expected = 1000 * 9 * sizes / sizes.sum()
        observed = np.zeros(2)
        for seed in range(1000):
            pruned = global_prune(mask, score_random(mask, seed), 0.5)
            for l in range(2):
                observed[l] += mask.layers[l].sum() - pruned.layers[l].sum()
        assert observed.sum() == 1000 * 9
        chi2 = float((((observed - expected) ** 2) / expected).sum())
        assert chi2 < 10.83  # p = 0.001, 1 degree of freedom

    def test_fraction_one_prunes_everything(self):
        mask = full_mask([4, 3])
        pruned = global_prune(mask, score_random(mask, seed=1), 1.0)
        assert pruned.kept_count() == 0


class TestFisherFormula:
    def test_single_sample_hand_values(self):
        """theta = [2, 1], g = [3, 4], one batch: delta = theta^2 g^2 / 2."""
        theta = [np.array([[2.0, 1.0]])]
        sq = [np.array([[9.0, 16.0]])]
        kept = [np.ones((1, 2), dtype=bool)]
        scores = _fisher_combine(theta, sq, batch_count=1, kept=kept)
        assert np.array_equal(scores.layers[0], np.array([[18.0, 8.0]]))

    def test_two_samples_hand_value(self):
        """theta = [3], g1 = 1, g2 = -1, batch size 1: delta = 9 * 2 / 4."""
        theta = [np.array([[3.0]])]
        sq = [np.array([[2.0]])]
        kept = [np.ones((1, 1), dtype=bool)]
        scores = _fisher_combine(theta, sq, batch_count=2, kept=kept)
        assert scores.layers[0][0, 0] == 4.5

    def test_zero_gradients_give_zero_scores(self):
        """All-zero inputs zero every weight gradient, hence every score."""
        net = init_network([2, 3], seed=1)
        mask = full_mask([2, 3])
        data = Dataset(np.zeros((4, 2)), np.array([0, 1, 2, 0]))
        scores, _ = score_fisher(net, mask, data, FisherConfig(4, 2))
        assert np.all(scores.layers[0] == 0.0)


class TestScoreFisher:
    def test_batch_one_matches_per_sample_oracle(self):
        """Independent oracle: explicit loop over samples accumulating g^2."""
        arch = (4, 5, 3)
        net = init_network(arch, seed=7)
        mask = full_mask(arch)
        from ticketlab import gen_synthetic

        data = gen_synthetic(3, 4, 8, seed=13, noise=0.3)
        scores, passes = score_fisher(net, mask, data, FisherConfig(len(data), 1))
        assert passes == len(data)

        acc = [np.zeros_like(w) for w in net.weights]
        for n in range(len(data)):
            _, g = loss_and_grads(
                net, mask, Dataset(data.inputs[n : n + 1], data.labels[n : n + 1])
            )
            for l in range(len(acc)):
                acc[l] += g.weights[l] ** 2
        for l, w in enumerate(net.weights):
            expected = w * w * acc[l] / (2 * len(data))
            np.testing.assert_allclose(scores.layers[l], expected, rtol=1e-12, atol=0)

    def test_backward_pass_count_is_batch_count(self):
        net = init_network([2, 3], seed=1)
        mask = full_mask([2, 3])
        from ticketlab import gen_synthetic

        data = gen_synthetic(3, 2, 20, seed=2)
        _, passes = score_fisher(net, mask, data, FisherConfig(60, 10))
        assert passes == 6
        _, passes = score_fisher(net, mask, data, FisherConfig(60, 60))
        assert passes == 1
        _, passes = score_fisher(net, mask, data, FisherConfig(55, 10))
        assert passes == 6  # ceil(55 / 10)

    def test_scores_nonnegative_and_finite(self):
        arch = (3, 4, 2)
        net = init_network(arch, seed=2)
        mask = full_mask(arch)
        from ticketlab import gen_synthetic

        data = gen_synthetic(2, 3, 10, seed=4)
        scores, _ = score_fisher(net, mask, data, FisherConfig(20, 5))
        for s in scores.layers:
            assert np.all(s >= 0.0) and np.all(np.isfinite(s))

    def test_insufficient_samples_rejected(self):
        net = init_network([2, 3], seed=1)
        from ticketlab import gen_synthetic

        data = gen_synthetic(3, 2, 3, seed=2)
        with pytest.raises(UsageError):
            score_fisher(net, full_mask([2, 3]), data, FisherConfig(100, 10))

    def test_batch_size_cannot_exceed_sample_count(self):
        with pytest.raises(UsageError):
            FisherConfig(10, 11)


class TestGlobalPrune:
    def test_two_smallest_of_ten(self):
        net = one_layer_net([np.arange(1.0, 11.0)])
        mask = full_mask([10, 1])
        pruned = global_prune(mask, score_l1(net, mask), 0.2)
        expected = np.ones((1, 10), dtype=np.uint8)
        expected[0, :2] = 0
        assert np.array_equal(pruned.layers[0], expected)

    def test_fraction_zero_is_identity(self):
        mask = full_mask([4, 3])
        pruned = global_prune(mask, score_random(mask, 1), 0.0)
        assert np.array_equal(pruned.layers[0], mask.layers[0])

    def test_fraction_out_of_range(self):
        mask = full_mask([4, 3])
        with pytest.raises(UsageError):
            global_prune(mask, score_random(mask, 1), 1.5)

    def test_global_not_local(self):
        """All of layer A scores below layer B: removals drain A first."""
        net = DenseNetwork(
            [np.full((3, 4), 0.01) + np.arange(12).reshape(3, 4) * 1e-4, np.full((2, 3), 5.0)],
            [np.zeros(3), np.zeros(2)],
        )
        mask = full_mask([4, 3, 2])
        pruned = global_prune(mask, score_l1(net, mask), 12 / 18)
        assert pruned.layers[0].sum() == 0
        assert pruned.layers[1].sum() == 6

    @given(
        f1=st.floats(0.0, 1.0, allow_nan=False),
        f2=st.floats(0.0, 1.0, allow_nan=False),
        seed=st.integers(0, 10_000),
    )
    @settings(max_examples=40, deadline=None)
    def test_monotone_containment(self, f1, f2, seed):
        if f1 > f2:
            f1, f2 = f2, f1
        mask = full_mask([5, 4, 3])
        scores = score_random(mask, seed)
        light = global_prune(mask, scores, f1)
        heavy = global_prune(mask, scores, f2)
        for hl, ll in zip(heavy.layers, light.layers):
            assert np.all(hl <= ll)

    @given(fraction=st.floats(0.0, 1.0, allow_nan=False), seed=st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_removal_count_exact(self, fraction, seed):
        mask = full_mask([6, 5, 2])
        scores = score_random(mask, seed)
        pruned = global_prune(mask, scores, fraction)
        before = mask.kept_count()
        assert before - pruned.kept_count() == removal_count(before, fraction)

    def test_round_half_up(self):
        assert removal_count(10, 0.25) == 3  # 2.5 rounds up
        assert removal_count(10, 0.24) == 2
        assert removal_count(3, 0.5) == 2  # 1.5 rounds up

    def test_tie_break_by_layer_then_flat_index(self):
        scores = PruneScore([np.full((1, 3), 0.5), np.full((2, 1), 0.5)])
        mask = full_mask([3, 1, 2])
        pruned = global_prune(mask, scores, 2 / 5)
        assert np.array_equal(pruned.layers[0], np.array([[0, 0, 1]], dtype=np.uint8))
        assert np.array_equal(pruned.layers[1], np.array([[1], [1]], dtype=np.uint8))

    def test_previously_pruned_positions_unchanged(self):
        mask = PruneMask([np.array([[0, 1, 1, 1]], dtype=np.uint8)])
        net = one_layer_net([[9.9, 0.3, 0.2, 0.1]])
        pruned = global_prune(mask, score_l1(net, mask), 1 / 3)
        assert np.array_equal(pruned.layers[0], np.array([[0, 1, 1, 0]], dtype=np.uint8))

    def test_non_finite_kept_scores_rejected(self):
        mask = full_mask([2, 1])
        scores = PruneScore([np.array([[np.nan, 1.0]])])
        with pytest.raises(UsageError):
            global_prune(mask, scores, 0.5)
