"""Batch-level empirical distributions and the plug-in MI estimate."""

from collections import Counter

import numpy as np
import pytest

from milc.batchstats import (
    empirical_label_dist,
    mi_estimate,
    naive_empirical_mi,
    one_hot_targets,
    predicted_marginal,
    smoothed_targets,
)
from milc.info import cross_entropy, entropy


class TestEmpiricalLabelDist:
    def test_frequency_counting(self):
        np.testing.assert_allclose(
            empirical_label_dist([0, 0, 1, 3], 4), [0.5, 0.25, 0.0, 0.25], atol=0
        )

    def test_singleton(self):
        np.testing.assert_array_equal(empirical_label_dist([1], 2), [0.0, 1.0])

    def test_balanced_large_batch_near_uniform(self):
        rng = np.random.default_rng(6)
        labels = rng.integers(0, 10, size=512)
        dist = empirical_label_dist(labels, 10)
        assert np.all(np.abs(dist - 0.1) < 0.08)

    def test_entries_are_exact_count_ratios(self):
        rng = np.random.default_rng(7)
        labels = rng.integers(0, 7, size=53)
        dist = empirical_label_dist(labels, 7)
        counts = Counter(int(v) for v in labels)
        expected = np.array([counts.get(c, 0) for c in range(7)]) / 53.0
        assert np.array_equal(dist, expected)

    def test_label_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            empirical_label_dist([0, 4], 4)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            empirical_label_dist([], 4)


class TestTargets:
    def test_one_hot_single(self):
        np.testing.assert_array_equal(one_hot_targets([1], 3), [[0.0, 1.0, 0.0]])

    def test_one_hot_pair(self):
        np.testing.assert_array_equal(
            one_hot_targets([0, 2], 3), [[1, 0, 0], [0, 0, 1]]
        )

    def test_one_hot_rows_sum_to_one(self):
        rng = np.random.default_rng(8)
        rows = one_hot_targets(rng.integers(0, 5, size=20), 5)
        np.testing.assert_array_equal(rows.sum(axis=1), np.ones(20))

    def test_smoothed_epsilon_zero_is_one_hot_exactly(self):
        labels = [0, 3, 1]
        assert np.array_equal(smoothed_targets(labels, 4, 0.0), one_hot_targets(labels, 4))

    def test_smoothed_binary_example(self):
        np.testing.assert_allclose(
            smoothed_targets([0], 2, 0.1), [[0.95, 0.05]], atol=1e-15
        )

    def test_smoothed_ten_class_default_epsilon(self):
        row = smoothed_targets([1], 10, 0.1)[0]
        assert row[1] == pytest.approx(0.91, abs=1e-12)
        off = np.delete(row, 1)
        np.testing.assert_allclose(off, 0.01, atol=1e-12)

    def test_smoothed_epsilon_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            smoothed_targets([0], 2, 1.5)


class TestPredictedMarginal:
    def test_average_of_opposite_rows(self):
        np.testing.assert_allclose(
            predicted_marginal([[1.0, 0.0], [0.0, 1.0]]), [0.5, 0.5], atol=1e-15
        )

    def test_identical_rows_pass_through(self):
        np.testing.assert_allclose(
            predicted_marginal([[0.3, 0.7]] * 5), [0.3, 0.7], atol=1e-15
        )

    def test_output_sums_to_one(self):
        rng = np.random.default_rng(9)
        preds = rng.dirichlet(np.ones(6), size=32)
        assert predicted_marginal(preds).sum() == pytest.approx(1.0, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            predicted_marginal(np.zeros((0, 3)))


class TestMiEstimate:
    def test_confident_correct_balanced_binary_is_one_bit(self):
        targets = one_hot_targets([0, 1, 0, 1], 2)
        assert mi_estimate(targets, targets, base="bits") == pytest.approx(
            1.0, abs=1e-9
        )

    def test_constant_predictor_equal_to_marginal_is_zero(self):
        targets = one_hot_targets([0, 0, 1, 1, 1, 1], 2)
        preds = np.tile([2.0 / 6.0, 4.0 / 6.0], (6, 1))
        assert mi_estimate(preds, targets) == pytest.approx(0.0, abs=1e-12)

    def test_matches_hand_computed_difference(self):
        rng = np.random.default_rng(10)
        preds = rng.dirichlet(np.ones(4), size=8)
        targets = one_hot_targets(rng.integers(0, 4, size=8), 4)
        p_y = targets.mean(axis=0)
        q_y = preds.mean(axis=0)
        conditional = np.mean(
            [cross_entropy(targets[i], preds[i]) for i in range(8)]
        )
        expected = cross_entropy(p_y, q_y) - conditional
        assert mi_estimate(preds, targets) == pytest.approx(expected, abs=1e-9)

    def test_self_targets_reduce_to_entropy_difference(self):
        rng = np.random.default_rng(11)
        preds = rng.dirichlet(np.ones(5), size=16)
        expected = entropy(preds.mean(axis=0)) - np.mean(
            [entropy(row) for row in preds]
        )
        assert mi_estimate(preds, preds) == pytest.approx(expected, abs=1e-9)

    def test_can_be_negative_for_poor_fit(self):
        targets = one_hot_targets([0, 1], 2)
        preds = np.array([[0.1, 0.9], [0.9, 0.1]])
        assert mi_estimate(preds, targets) < 0.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            mi_estimate(np.full((2, 3), 1 / 3), one_hot_targets([0, 1], 2))


class TestNaiveEmpiricalMi:
    def test_balanced_binary_one_bit(self):
        assert naive_empirical_mi([0, 1, 0, 1], 2, base="bits") == pytest.approx(
            1.0, abs=1e-12
        )

    def test_constant_labels_zero(self):
        assert naive_empirical_mi([2, 2, 2], 3) == 0.0

    def test_recorded_four_class_example(self):
        assert naive_empirical_mi([0, 0, 1, 3], 4, base="bits") == pytest.approx(
            1.5, abs=1e-12
        )
