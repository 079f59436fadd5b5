"""Empirical batch distributions and the plug-in mutual-information estimate.

A minibatch of labeled samples induces an empirical label distribution and,
through the model's conditional predictions, a predicted label marginal (the
batch average of the prediction rows). The plug-in mutual-information
estimate is the difference of two cross entropies built from those pieces.
"""

from __future__ import annotations

import numpy as np

from .info import LOG_EPS, _from_nats
from .validation import as_prob_matrix, check_base, check_labels

__all__ = [
    "empirical_label_dist",
    "one_hot_targets",
    "smoothed_targets",
    "predicted_marginal",
    "mi_estimate",
    "naive_empirical_mi",
]


def empirical_label_dist(labels, n_classes: int) -> np.ndarray:
    """Frequency distribution of integer labels over ``n_classes`` classes.

    Counts are exact integers before the single final division, so every
    entry is exactly count/B.
    """
    lab = check_labels(labels, n_classes)
    counts = np.bincount(lab, minlength=n_classes)
    return counts / float(lab.size)


def one_hot_targets(labels, n_classes: int) -> np.ndarray:
    """One-hot target matrix, shape (B, n_classes); row i is 1 at labels[i]."""
    lab = check_labels(labels, n_classes)
    out = np.zeros((lab.size, n_classes), dtype=np.float64)
    out[np.arange(lab.size), lab] = 1.0
    return out


def smoothed_targets(labels, n_classes: int, epsilon: float) -> np.ndarray:
    """Label-smoothed targets (1-eps)*onehot + eps*uniform.

    ``epsilon = 0`` reduces exactly to :func:`one_hot_targets`.
    """
    eps = float(epsilon)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon!r}")
    onehot = one_hot_targets(labels, n_classes)
    if eps == 0.0:
        return onehot
    return (1.0 - eps) * onehot + eps / n_classes


def predicted_marginal(preds) -> np.ndarray:
    """Predicted label marginal: the average of the prediction rows.

    Parameters
    ----------
    preds : array_like
        Batch of prediction rows, shape (B, C), each a distribution.

    Returns
    -------
    numpy.ndarray
        Valid distribution over C classes.
    """
    p = as_prob_matrix(preds, "preds")
    return p.mean(axis=0)


def mi_estimate(preds, targets, base: str = "nats") -> float:
    """Plug-in mutual-information estimate from a prediction/target batch.

    Returns H(P_hat_Y, Q_Y) - H(P_hat_{Y|X}, Q_{Y|X}) where P_hat_Y is the
    row average of ``targets``, Q_Y is :func:`predicted_marginal` of
    ``preds``, and the conditional term is the batch-mean row-wise cross
    entropy of targets against predictions. The estimate may be negative for
    a poorly fit model; it is reported as-is.
    """
    check_base(base)
    p = as_prob_matrix(preds, "preds")
    t = as_prob_matrix(targets, "targets")
    if p.shape != t.shape:
        raise ValueError(f"preds shape {p.shape} != targets shape {t.shape}")
    p_hat_y = t.mean(axis=0)
    q_y = p.mean(axis=0)
    marginal = -float(np.dot(p_hat_y, np.log(np.clip(q_y, LOG_EPS, None))))
    conditional = -float(
        np.mean(np.sum(t * np.log(np.clip(p, LOG_EPS, None)), axis=1))
    )
    return _from_nats(marginal - conditional, base)


def naive_empirical_mi(labels, n_classes: int, base: str = "nats") -> float:
    """Degenerate empirical mutual information from labels alone.

    With pairwise-distinct inputs the empirical conditional distribution is
    one-hot per sample, so the conditional entropy term vanishes and the
    estimate collapses to the entropy of the empirical label distribution.
    This is the overfit estimate that entropy-gap bracketing warns about; it
    says nothing about the model.
    """
    from .info import entropy

    return entropy(empirical_label_dist(labels, n_classes), base)
