"""Estimator-style front end over the functional training pipeline.

:class:`MlpClassifier` exposes the dense network and the loss family through
the familiar fit/predict/predict_proba surface, so the model slots into
pipelines, grid search, and cross-validation. Features are min-max scaled to
the unit interval inside ``fit`` (the training pipeline's convention for
normalized inputs); the fitted scaling is reapplied at prediction time.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_is_fitted, validate_data

from .batchstats import empirical_label_dist
from .data import Dataset, batch_iter
from .harness import EpochMetrics, TrainConfig, evaluate
from .losses import compute_loss, mil_loss_with_marginal_target, softmax
from .nn import backward, forward, init_mlp, predict, sgd_step

__all__ = ["MlpClassifier"]


class MlpClassifier(ClassifierMixin, BaseEstimator):
    """Dense ReLU network trained with a configurable information loss.

    Parameters
    ----------
    loss : str
        One of ``cel``, ``cel_lsr``, ``cel_cp``, ``cel_lc``, ``mil``.
    epsilon : float
        Mixture weight of the lsr/cp/lc variants.
    lambda_ent : float
        Weight of the marginal cross-entropy term of ``mil``.
    hidden_layer_sizes : tuple of int
        Hidden widths; the input and output widths come from the data.
    learning_rate : float
        Constant SGD step size.
    momentum : float
        Heavy-ball coefficient in [0, 1).
    batch_size : int
        Minibatch size (capped at the sample count).
    epochs : int
        Training epochs.
    seed : int
        Seed for initialization and batch shuffling.
    train_marginal_scope : str
        ``"batch"`` (default) or ``"dataset"``: which empirical label
        distribution the ``mil`` marginal term uses.

    Attributes
    ----------
    classes_ : numpy.ndarray
        Sorted class labels seen in ``fit``.
    model_ : MlpModel
        The fitted network.
    final_metrics_ : EpochMetrics
        Dataset-scope metrics on the training data after the last epoch.
    """

    def __init__(
        self,
        loss: str = "cel",
        epsilon: float = 0.1,
        lambda_ent: float = 50.0,
        hidden_layer_sizes: tuple[int, ...] = (64, 64),
        learning_rate: float = 1e-3,
        momentum: float = 0.9,
        batch_size: int = 512,
        epochs: int = 77,
        seed: int = 0,
        train_marginal_scope: str = "batch",
    ) -> None:
        self.loss = loss
        self.epsilon = epsilon
        self.lambda_ent = lambda_ent
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed
        self.train_marginal_scope = train_marginal_scope

    def _scale(self, x: np.ndarray) -> np.ndarray:
        scaled = (x - self.data_min_) * self.inv_range_
        return np.clip(scaled, 0.0, 1.0)

    def fit(self, X, y):
        """Fit the network on (X, y); returns self."""
        X, y = validate_data(self, X, y, dtype=np.float64)
        self.classes_ = unique_labels(y)
        if self.classes_.size < 2:
            raise ValueError(
                f"fit requires at least 2 classes; got {self.classes_.size} class"
            )
        _, y_idx = np.unique(y, return_inverse=True)

        self.data_min_ = X.min(axis=0)
        span = X.max(axis=0) - self.data_min_
        self.inv_range_ = np.where(span > 0.0, 1.0 / np.where(span > 0.0, span, 1.0), 0.0)
        inputs = self._scale(X)

        n_classes = int(self.classes_.size)
        config = TrainConfig(
            loss_kind=self.loss,
            epsilon=self.epsilon,
            lambda_ent=self.lambda_ent,
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            batch_size=min(int(self.batch_size), X.shape[0]),
            epochs=self.epochs,
            seed=self.seed,
            layer_sizes=(self.n_features_in_, *map(int, self.hidden_layer_sizes), n_classes),
            train_marginal_scope=self.train_marginal_scope,
        )
        dataset = Dataset(
            inputs=inputs,
            labels=y_idx.astype(np.int64),
            n_classes=n_classes,
            provenance="estimator:fit",
        )
        loss_cfg = config.loss_config()
        marginal_target = None
        if config.loss_kind == "mil" and config.train_marginal_scope == "dataset":
            marginal_target = empirical_label_dist(dataset.labels, n_classes)

        model = init_mlp(config.layer_sizes, config.seed)
        for epoch in range(1, config.epochs + 1):
            for batch in batch_iter(dataset, config.batch_size, config.seed, epoch):
                logits, cache = forward(model, batch.inputs)
                if marginal_target is not None:
                    out = mil_loss_with_marginal_target(
                        logits, batch.labels, loss_cfg, p_y=marginal_target
                    )
                else:
                    out = compute_loss(config.loss_kind, logits, batch.labels, loss_cfg)
                grads = backward(model, cache, out.grad_logits)
                sgd_step(model, grads, config.learning_rate, config.momentum)

        self.model_ = model
        self.config_ = config
        self.n_iter_ = int(config.epochs)
        self.final_metrics_: EpochMetrics = evaluate(
            model,
            dataset,
            loss_kind=config.loss_kind,
            loss_config=loss_cfg,
            epoch=config.epochs,
            split="train",
        )
        return self

    def _logits(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        logits, _ = forward(self.model_, self._scale(X))
        return logits

    def decision_function(self, X) -> np.ndarray:
        """Decision scores: 1-D log-odds for binary, logits otherwise."""
        logits = self._logits(X)
        if self.classes_.size == 2:
            return logits[:, 1] - logits[:, 0]
        return logits

    def predict_proba(self, X) -> np.ndarray:
        """Class-membership distributions, one row per sample."""
        return softmax(self._logits(X))

    def predict(self, X) -> np.ndarray:
        """Most probable class label per sample."""
        logits = self._logits(X)
        return self.classes_[predict(logits)]
