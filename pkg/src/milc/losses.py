"""Classification objectives: cross entropy, its regularized variants, and
the mutual-information learning loss.

Every loss returns the batch-mean value together with its analytic gradient
with respect to the logits. Five kinds are supported:

- ``cel``: plain cross entropy against one-hot targets.
- ``cel_lsr``: label smoothing, (1-eps) H(P,Q) + eps H(U,Q).
- ``cel_cp``: confidence penalty, (1-eps) H(P,Q) - eps H(Q,Q).
- ``cel_lc``: label correction, (1-eps) H(P,Q) + eps H(Q,Q).
- ``mil``: mutual-information learning, H(P_hat_{Y|X}, Q_{Y|X})
  + lambda_ent * H(P_hat_Y, Q_Y), with Q_Y the batch predicted marginal.

H(Q,Q) denotes the entropy of the prediction itself, with gradient flowing
through both occurrences. Values are computed in the configured base (nats
by default); gradients are scaled consistently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .batchstats import empirical_label_dist, one_hot_targets, smoothed_targets
from .info import LN2, LOG_EPS
from .validation import check_base, check_labels

__all__ = [
    "LOSS_KINDS",
    "LossConfig",
    "LossOutput",
    "softmax",
    "cel_loss",
    "variant_loss",
    "mil_loss",
    "compute_loss",
]

LOSS_KINDS = ("cel", "cel_lsr", "cel_cp", "cel_lc", "mil")


@dataclass(frozen=True)
class LossConfig:
    """Loss hyperparameters.

    Parameters
    ----------
    epsilon : float
        Mixture weight of the lsr/cp/lc variants, in [0, 1].
    lambda_ent : float
        Non-negative weight of the marginal cross-entropy term of ``mil``.
    base : str
        Base in which loss values (and gradients) are expressed.
    """

    epsilon: float = 0.1
    lambda_ent: float = 50.0
    base: str = "nats"

    def __post_init__(self) -> None:
        if not 0.0 <= float(self.epsilon) <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")
        if float(self.lambda_ent) < 0.0:
            raise ValueError(f"lambda_ent must be >= 0, got {self.lambda_ent!r}")
        check_base(self.base)


@dataclass(frozen=True)
class LossOutput:
    """Batch-mean loss value and its gradient with respect to the logits."""

    value: float
    grad_logits: np.ndarray = field(repr=False)


def softmax(logits) -> np.ndarray:
    """Row-wise softmax with max subtraction for stability.

    Parameters
    ----------
    logits : array_like
        Real matrix of shape (B, C); all entries must be finite.

    Returns
    -------
    numpy.ndarray
        Matrix of the same shape whose rows are valid distributions.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 2:
        raise ValueError(f"logits must be 2-D, got shape {z.shape}")
    if z.shape[0] < 1 or z.shape[1] < 1:
        raise ValueError("logits must be non-empty in both dimensions")
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must contain only finite values")
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _check_logits_labels(logits, labels) -> tuple[np.ndarray, np.ndarray]:
    q = softmax(logits)
    lab = check_labels(labels, q.shape[1])
    if lab.size != q.shape[0]:
        raise ValueError(
            f"got {q.shape[0]} logit rows but {lab.size} labels"
        )
    return q, lab


def _base_scale(base: str) -> float:
    return 1.0 / LN2 if base == "bits" else 1.0


def _mean_cross_entropy(targets: np.ndarray, q: np.ndarray) -> float:
    # Batch-mean sum_c t_c log(1/q_c); zero-target terms contribute 0.
    logs = np.log(np.clip(q, LOG_EPS, None))
    return -float(np.mean(np.sum(targets * logs, axis=1)))


def cel_loss(logits, labels, config: LossConfig | None = None) -> LossOutput:
    """Batch-mean cross entropy against one-hot targets.

    Gradient per row is (q_i - onehot(y_i)) / B in nats, scaled by the base
    conversion factor when the configured base is bits.
    """
    cfg = config if config is not None else LossConfig()
    q, lab = _check_logits_labels(logits, labels)
    b = q.shape[0]
    onehot = one_hot_targets(lab, q.shape[1])
    scale = _base_scale(cfg.base)
    value = _mean_cross_entropy(onehot, q) * scale
    grad = (q - onehot) / b * scale
    return LossOutput(value=value, grad_logits=grad)


def _prediction_entropy_and_grad(q: np.ndarray) -> tuple[float, np.ndarray]:
    """Batch-mean prediction entropy H(Q,Q) and its logit gradient (nats).

    For one row, d/dz_k of -sum_c q_c ln q_c is -q_k (ln q_k + h) where h is
    that row's entropy.
    """
    b = q.shape[0]
    log_q = np.log(np.clip(q, LOG_EPS, None))
    h_rows = -np.sum(q * log_q, axis=1)
    value = float(np.mean(h_rows))
    grad = -q * (log_q + h_rows[:, None]) / b
    return value, grad


def variant_loss(kind: str, logits, labels, config: LossConfig | None = None) -> LossOutput:
    """Regularized cross-entropy variants ``cel_lsr``, ``cel_cp``, ``cel_lc``.

    With ``epsilon = 0`` every variant reduces exactly to :func:`cel_loss`.
    """
    if kind not in ("cel_lsr", "cel_cp", "cel_lc"):
        raise ValueError(f"unknown variant kind {kind!r}")
    cfg = config if config is not None else LossConfig()
    q, lab = _check_logits_labels(logits, labels)
    b, c = q.shape
    eps = float(cfg.epsilon)
    scale = _base_scale(cfg.base)

    if kind == "cel_lsr":
        targets = smoothed_targets(lab, c, eps)
        value = _mean_cross_entropy(targets, q)
        grad = (q - targets) / b
        return LossOutput(value=value * scale, grad_logits=grad * scale)

    onehot = one_hot_targets(lab, c)
    ce_value = _mean_cross_entropy(onehot, q)
    ce_grad = (q - onehot) / b
    hqq_value, hqq_grad = _prediction_entropy_and_grad(q)
    sign = -1.0 if kind == "cel_cp" else 1.0
    value = (1.0 - eps) * ce_value + sign * eps * hqq_value
    grad = (1.0 - eps) * ce_grad + sign * eps * hqq_grad
    return LossOutput(value=value * scale, grad_logits=grad * scale)


def mil_loss(logits, labels, config: LossConfig | None = None) -> LossOutput:
    """Mutual-information learning objective.

    Value is the batch-mean one-hot cross entropy plus ``lambda_ent`` times
    the cross entropy between the batch empirical label distribution and the
    predicted marginal (the batch average of the prediction rows). The
    marginal term couples every sample through the shared marginal, so its
    gradient spreads across the whole batch.

    Parameters
    ----------
    logits : array_like
        Shape (B, C). A batch of size 1 is permitted but degenerate (the
        marginal term duplicates the conditional term); a warning is emitted.
    labels : array_like
        Integer labels in [0, C).
    config : LossConfig, optional
        Supplies ``lambda_ent`` and the base.
    """
    return _mil_loss_impl(logits, labels, config, p_y=None)


def _mil_loss_impl(
    logits, labels, config: LossConfig | None, p_y
) -> LossOutput:
    cfg = config if config is not None else LossConfig()
    lam = float(cfg.lambda_ent)
    if lam < 0.0:
        raise ValueError(f"lambda_ent must be >= 0, got {lam!r}")
    q, lab = _check_logits_labels(logits, labels)
    b, c = q.shape
    if b == 1:
        warnings.warn(
            "mil loss on a batch of size 1 is degenerate: the marginal "
            "term duplicates the conditional term",
            UserWarning,
            stacklevel=3,
        )
    onehot = one_hot_targets(lab, c)
    cond_value = _mean_cross_entropy(onehot, q)
    grad = (q - onehot) / b

    if p_y is None:
        p_hat = empirical_label_dist(lab, c)
    else:
        from .validation import as_prob_vector

        p_hat = as_prob_vector(p_y, "p_y")
        if p_hat.size != c:
            raise ValueError(f"p_y must have {c} entries, got {p_hat.size}")
    q_y = q.mean(axis=0)
    q_y_safe = np.clip(q_y, LOG_EPS, None)
    marg_value = -float(np.dot(p_hat, np.log(q_y_safe)))

    # d marg / d z_{ik} = -(q_{ik}/B) (r_k - q_i . r) with r = p_hat / q_y
    # restricted to classes with positive empirical mass.
    r = np.where(p_hat > 0.0, p_hat / q_y_safe, 0.0)
    qr = q @ r
    grad = grad + lam * (-(q * (r[None, :] - qr[:, None])) / b)

    scale = _base_scale(cfg.base)
    value = (cond_value + lam * marg_value) * scale
    return LossOutput(value=value, grad_logits=grad * scale)


def mil_loss_with_marginal_target(
    logits, labels, config: LossConfig | None = None, p_y=None
) -> LossOutput:
    """:func:`mil_loss` with an explicit target label distribution.

    ``p_y`` replaces the batch empirical label distribution in the marginal
    term; ``None`` falls back to the batch statistic. Used by the training
    harness when the marginal scope is set to the whole dataset.
    """
    return _mil_loss_impl(logits, labels, config, p_y=p_y)


def compute_loss(kind: str, logits, labels, config: LossConfig | None = None) -> LossOutput:
    """Dispatch on loss kind; see :data:`LOSS_KINDS`."""
    if kind == "cel":
        return cel_loss(logits, labels, config)
    if kind in ("cel_lsr", "cel_cp", "cel_lc"):
        return variant_loss(kind, logits, labels, config)
    if kind == "mil":
        return mil_loss(logits, labels, config)
    raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")
