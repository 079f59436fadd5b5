"""Training and evaluation harness: epoch loop, per-epoch metrics,
checkpointing.

Each epoch iterates seeded minibatches, applies the configured loss and a
heavy-ball SGD step, then evaluates the model on both the train and test
splits. Per-split metrics are the error rate, the loss value in nats, and
the plug-in information quantities in bits: the marginal cross entropy
H(P_hat_Y, Q_Y), the conditional cross entropy H(P_hat_{Y|X}, Q_{Y|X}), and
their difference as the mutual-information estimate (logged exactly as that
difference).

During training the empirical label distribution and the predicted marginal
are batch-level statistics; evaluation defaults to dataset-level statistics.
Both scopes are visible in :class:`TrainConfig`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .batchstats import empirical_label_dist
from .data import Dataset, batch_iter
from .info import LN2, LOG_EPS
from .losses import (
    LOSS_KINDS,
    LossConfig,
    compute_loss,
    mil_loss_with_marginal_target,
    softmax,
)
from .nn import MlpModel, backward, forward, init_mlp, predict, save_checkpoint, sgd_step
from .validation import NumericError

__all__ = ["TrainConfig", "EpochMetrics", "evaluate", "train"]

_MARGINAL_SCOPES = ("batch", "dataset")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters and plumbing for one training run.

    Defaults reproduce the reference recipe: constant learning rate 1e-3,
    momentum 0.9, batch size 512, 77 epochs, loss weights epsilon = 0.1 and
    lambda_ent = 50, network widths 784-64-64-10.
    """

    loss_kind: str = "cel"
    epsilon: float = 0.1
    lambda_ent: float = 50.0
    learning_rate: float = 1e-3
    momentum: float = 0.9
    batch_size: int = 512
    epochs: int = 77
    seed: int = 0
    layer_sizes: tuple[int, ...] = (784, 64, 64, 10)
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    checkpoint_interval: int = 0
    train_marginal_scope: str = "batch"
    eval_marginal_scope: str = "dataset"

    def __post_init__(self) -> None:
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(
                f"loss_kind must be one of {LOSS_KINDS}, got {self.loss_kind!r}"
            )
        if not float(self.learning_rate) > 0.0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate!r}")
        if not 0.0 <= float(self.momentum) < 1.0:
            raise ValueError(f"momentum must lie in [0, 1), got {self.momentum!r}")
        if int(self.batch_size) < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size!r}")
        if int(self.epochs) < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs!r}")
        if int(self.checkpoint_interval) < 0:
            raise ValueError(
                f"checkpoint_interval must be >= 0, got {self.checkpoint_interval!r}"
            )
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError(f"layer_sizes must be >= 2 positive widths, got {sizes}")
        object.__setattr__(self, "layer_sizes", sizes)
        for scope_name in ("train_marginal_scope", "eval_marginal_scope"):
            scope = getattr(self, scope_name)
            if scope not in _MARGINAL_SCOPES:
                raise ValueError(
                    f"{scope_name} must be one of {_MARGINAL_SCOPES}, got {scope!r}"
                )
        # Loss hyperparameter ranges are enforced by LossConfig.
        LossConfig(epsilon=self.epsilon, lambda_ent=self.lambda_ent)

    def loss_config(self) -> LossConfig:
        """The nats-based loss configuration this run trains with."""
        return LossConfig(epsilon=self.epsilon, lambda_ent=self.lambda_ent, base="nats")


@dataclass(frozen=True)
class EpochMetrics:
    """One logged (epoch, split) row; mi_bits is exactly h_y - h_y_given_x."""

    epoch: int
    split: str
    error_rate: float
    loss_nats: float
    mi_bits: float
    h_y_bits: float
    h_y_given_x_bits: float

    def as_row(self) -> tuple:
        return (
            self.epoch,
            self.split,
            self.error_rate,
            self.loss_nats,
            self.mi_bits,
            self.h_y_bits,
            self.h_y_given_x_bits,
        )


def _split_statistics(
    preds: np.ndarray, labels: np.ndarray, n_classes: int
) -> tuple[float, float]:
    """Marginal and conditional cross entropies (nats) over one sample block."""
    p_hat = empirical_label_dist(labels, n_classes)
    q_y = np.clip(preds.mean(axis=0), LOG_EPS, None)
    h_y = -float(np.dot(p_hat, np.log(q_y)))
    rows = np.clip(preds[np.arange(labels.size), labels], LOG_EPS, None)
    h_ygx = -float(np.mean(np.log(rows)))
    return h_y, h_ygx


def _loss_value(
    kind: str,
    logits: np.ndarray,
    labels: np.ndarray,
    cfg: LossConfig,
    p_y: np.ndarray | None,
) -> float:
    if kind == "mil" and p_y is not None:
        return mil_loss_with_marginal_target(logits, labels, cfg, p_y=p_y).value
    return compute_loss(kind, logits, labels, cfg).value


def evaluate(
    model: MlpModel,
    dataset: Dataset,
    loss_kind: str = "cel",
    loss_config: LossConfig | None = None,
    epoch: int = 0,
    split: str = "test",
    marginal_scope: str = "dataset",
    batch_size: int = 512,
    seed: int = 0,
) -> EpochMetrics:
    """Compute the logged metrics for one model on one split.

    With ``marginal_scope="dataset"`` (the default) the label distribution,
    predicted marginal, and loss are computed once over the whole split.
    With ``"batch"`` the split is partitioned by the seeded batch shuffle
    (epoch index 0) and the entropy/loss statistics are averaged over
    batches, mirroring the training-time view. The error rate is identical
    under both scopes. Evaluation is pure: repeated calls give identical
    metrics.
    """
    if not isinstance(dataset, Dataset):
        raise ValueError("dataset must be a Dataset")
    if marginal_scope not in _MARGINAL_SCOPES:
        raise ValueError(f"marginal_scope must be one of {_MARGINAL_SCOPES}")
    if loss_kind not in LOSS_KINDS:
        raise ValueError(f"loss_kind must be one of {LOSS_KINDS}, got {loss_kind!r}")
    cfg = loss_config if loss_config is not None else LossConfig()
    if cfg.base != "nats":
        cfg = replace(cfg, base="nats")

    logits, _ = forward(model, dataset.inputs)
    error_rate = float(np.mean(predict(logits) != dataset.labels))

    if marginal_scope == "dataset":
        preds = softmax(logits)
        h_y_nats, h_ygx_nats = _split_statistics(preds, dataset.labels, dataset.n_classes)
        loss_nats = _loss_value(loss_kind, logits, dataset.labels, cfg, p_y=None)
    else:
        h_y_sum = 0.0
        h_ygx_sum = 0.0
        loss_sum = 0.0
        n_batches = 0
        for batch in batch_iter(dataset, batch_size, seed, epoch=0):
            b_logits, _ = forward(model, batch.inputs)
            b_preds = softmax(b_logits)
            h_y, h_ygx = _split_statistics(b_preds, batch.labels, dataset.n_classes)
            h_y_sum += h_y
            h_ygx_sum += h_ygx
            loss_sum += _loss_value(loss_kind, b_logits, batch.labels, cfg, p_y=None)
            n_batches += 1
        h_y_nats = h_y_sum / n_batches
        h_ygx_nats = h_ygx_sum / n_batches
        loss_nats = loss_sum / n_batches

    h_y_bits = h_y_nats / LN2
    h_ygx_bits = h_ygx_nats / LN2
    return EpochMetrics(
        epoch=int(epoch),
        split=str(split),
        error_rate=error_rate,
        loss_nats=float(loss_nats),
        mi_bits=h_y_bits - h_ygx_bits,
        h_y_bits=h_y_bits,
        h_y_given_x_bits=h_ygx_bits,
    )


def train(
    config: TrainConfig,
    train_set: Dataset,
    test_set: Dataset,
    out_dir: str | None = None,
    on_epoch: Callable[[EpochMetrics, EpochMetrics], None] | None = None,
) -> tuple[MlpModel, list[EpochMetrics]]:
    """Run the full training pipeline and return the model and metrics log.

    Every epoch iterates the seeded batches, computes the configured loss
    and its logit gradient, backpropagates, and applies the heavy-ball SGD
    update; afterwards both splits are evaluated and appended to the log.
    Deterministic given the config: reruns produce bit-identical parameters
    and metrics. A non-finite loss aborts with a diagnostic naming the epoch
    and batch.

    Parameters
    ----------
    config : TrainConfig
        Hyperparameters; ``epochs = 0`` returns the freshly initialized
        model and an empty log.
    train_set, test_set : Dataset
        Splits with matching feature width and class count.
    out_dir : str, optional
        When given, checkpoints land here: at every
        ``config.checkpoint_interval`` epochs (0 disables interval saves)
        and always at completion as ``checkpoint.bin``.
    on_epoch : callable, optional
        Called after each epoch with the train and test metrics rows.
    """
    for name, ds in (("train_set", train_set), ("test_set", test_set)):
        if not isinstance(ds, Dataset):
            raise ValueError(f"{name} must be a Dataset")
        if ds.n_features != config.layer_sizes[0]:
            raise ValueError(
                f"{name} feature width {ds.n_features} does not match "
                f"model input width {config.layer_sizes[0]}"
            )
        if ds.n_classes != config.layer_sizes[-1]:
            raise ValueError(
                f"{name} has {ds.n_classes} classes, model outputs "
                f"{config.layer_sizes[-1]}"
            )

    model = init_mlp(config.layer_sizes, config.seed)
    loss_cfg = config.loss_config()
    marginal_target = None
    if config.loss_kind == "mil" and config.train_marginal_scope == "dataset":
        marginal_target = empirical_label_dist(train_set.labels, train_set.n_classes)

    metrics: list[EpochMetrics] = []
    for epoch in range(1, int(config.epochs) + 1):
        for batch_index, batch in enumerate(
            batch_iter(train_set, config.batch_size, config.seed, epoch)
        ):
            logits, cache = forward(model, batch.inputs)
            if config.loss_kind == "mil" and marginal_target is not None:
                out = mil_loss_with_marginal_target(
                    logits, batch.labels, loss_cfg, p_y=marginal_target
                )
            else:
                out = compute_loss(config.loss_kind, logits, batch.labels, loss_cfg)
            if not math.isfinite(out.value):
                raise NumericError(
                    f"non-finite loss {out.value!r} at epoch {epoch} "
                    f"batch {batch_index}"
                )
            grads = backward(model, cache, out.grad_logits)
            sgd_step(model, grads, config.learning_rate, config.momentum)

        row_train = evaluate(
            model,
            train_set,
            loss_kind=config.loss_kind,
            loss_config=loss_cfg,
            epoch=epoch,
            split="train",
            marginal_scope=config.eval_marginal_scope,
            batch_size=config.batch_size,
            seed=config.seed,
        )
        row_test = evaluate(
            model,
            test_set,
            loss_kind=config.loss_kind,
            loss_config=loss_cfg,
            epoch=epoch,
            split="test",
            marginal_scope=config.eval_marginal_scope,
            batch_size=config.batch_size,
            seed=config.seed,
        )
        metrics.extend((row_train, row_test))
        if on_epoch is not None:
            on_epoch(row_train, row_test)
        if (
            out_dir is not None
            and config.checkpoint_interval > 0
            and epoch % config.checkpoint_interval == 0
        ):
            save_checkpoint(
                os.path.join(out_dir, f"checkpoint_epoch{epoch:04d}.bin"), model, epoch
            )

    if out_dir is not None:
        save_checkpoint(os.path.join(out_dir, "checkpoint.bin"), model, int(config.epochs))
    return model, metrics
