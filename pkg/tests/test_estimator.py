"""Tests for the estimator front end."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.datasets import make_blobs
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import cross_val_score
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.utils.estimator_checks import parametrize_with_checks

from milc.estimator import MlpClassifier
from milc.harness import EpochMetrics


def small_estimator(**overrides):
    params = dict(
        hidden_layer_sizes=(8,),
        epochs=30,
        learning_rate=0.05,
        batch_size=16,
        seed=0,
    )
    params.update(overrides)
    return MlpClassifier(**params)


@pytest.fixture(scope="module")
def blobs3():
    x, y = make_blobs(
        n_samples=150, centers=3, n_features=4, cluster_std=1.0, random_state=5
    )
    return x, y


@pytest.fixture(scope="module")
def blobs2():
    x, y = make_blobs(
        n_samples=120, centers=2, n_features=4, cluster_std=1.0, random_state=7
    )
    return x, y


class TestFitPredict:
    def test_separable_blobs_score(self, blobs3):
        x, y = blobs3
        est = small_estimator().fit(x, y)
        assert est.score(x, y) >= 0.95

    def test_classes_sorted_and_preserved(self, blobs3):
        x, y = blobs3
        est = small_estimator().fit(x, y + 10)
        assert est.classes_.tolist() == [10, 11, 12]
        assert set(est.predict(x)) <= {10, 11, 12}

    def test_string_labels(self, blobs2):
        x, y = blobs2
        names = np.array(["neg", "pos"])
        est = small_estimator().fit(x, names[y])
        assert est.classes_.tolist() == ["neg", "pos"]
        assert set(est.predict(x)) <= {"neg", "pos"}

    def test_single_class_rejected(self):
        x = np.random.default_rng(0).random((10, 3))
        with pytest.raises(ValueError, match="1 class"):
            small_estimator().fit(x, np.zeros(10))

    def test_predict_feature_count_checked(self, blobs3):
        x, y = blobs3
        est = small_estimator().fit(x, y)
        with pytest.raises(ValueError, match="features"):
            est.predict(x[:, :2])

    def test_final_metrics_attached(self, blobs3):
        x, y = blobs3
        est = small_estimator().fit(x, y)
        assert isinstance(est.final_metrics_, EpochMetrics)
        assert est.final_metrics_.split == "train"
        assert 0.0 <= est.final_metrics_.error_rate <= 1.0
        assert est.n_iter_ == est.epochs

    def test_dataset_marginal_scope_fits(self, blobs3):
        x, y = blobs3
        est = small_estimator(
            loss="mil", lambda_ent=1.0, train_marginal_scope="dataset"
        ).fit(x, y)
        assert est.score(x, y) >= 0.9


class TestPredictionSurfaces:
    def test_proba_rows_sum_to_one(self, blobs3):
        x, y = blobs3
        proba = small_estimator().fit(x, y).predict_proba(x)
        assert proba.shape == (x.shape[0], 3)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
        assert proba.min() >= 0.0

    def test_binary_decision_function_is_1d(self, blobs2):
        x, y = blobs2
        est = small_estimator().fit(x, y)
        scores = est.decision_function(x)
        assert scores.shape == (x.shape[0],)
        np.testing.assert_array_equal(
            est.predict(x), est.classes_[(scores > 0).astype(int)]
        )

    def test_multiclass_decision_function_is_2d(self, blobs3):
        x, y = blobs3
        est = small_estimator().fit(x, y)
        scores = est.decision_function(x)
        assert scores.shape == (x.shape[0], 3)
        np.testing.assert_array_equal(
            est.predict(x), est.classes_[scores.argmax(axis=1)]
        )

    def test_proba_argmax_matches_predict(self, blobs3):
        x, y = blobs3
        est = small_estimator().fit(x, y)
        np.testing.assert_array_equal(
            est.predict(x), est.classes_[est.predict_proba(x).argmax(axis=1)]
        )

    def test_unfitted_raises(self, blobs3):
        x, _ = blobs3
        for method in ("predict", "predict_proba", "decision_function"):
            with pytest.raises(NotFittedError):
                getattr(small_estimator(), method)(x)


class TestSklearnProtocol:
    def test_get_set_params_roundtrip(self):
        est = small_estimator()
        params = est.get_params()
        assert params["loss"] == "cel"
        assert params["hidden_layer_sizes"] == (8,)
        est.set_params(loss="mil", lambda_ent=2.0)
        assert est.get_params()["loss"] == "mil"
        assert est.get_params()["lambda_ent"] == 2.0

    def test_clone_is_unfitted_copy(self, blobs3):
        x, y = blobs3
        est = small_estimator().fit(x, y)
        fresh = clone(est)
        assert fresh.get_params() == est.get_params()
        with pytest.raises(NotFittedError):
            fresh.predict(x)

    def test_same_seed_same_predictions(self, blobs3):
        x, y = blobs3
        a = small_estimator().fit(x, y).predict_proba(x)
        b = small_estimator().fit(x, y).predict_proba(x)
        np.testing.assert_array_equal(a, b)

    def test_pipeline_and_cross_val(self, blobs3):
        x, y = blobs3
        pipe = make_pipeline(StandardScaler(), small_estimator(epochs=15))
        scores = cross_val_score(pipe, x, y, cv=3)
        assert scores.mean() >= 0.9


@parametrize_with_checks(
    [MlpClassifier(hidden_layer_sizes=(8,), epochs=20, learning_rate=0.05, batch_size=16)]
)
def test_sklearn_estimator_contract(estimator, check):
    check(estimator)
