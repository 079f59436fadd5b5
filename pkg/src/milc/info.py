"""Scalar information measures over finite distributions.

All functions take an explicit log base (``"bits"`` or ``"nats"``); the
conversion factor between the two is exactly ``ln 2``. Probabilities are
clamped to 1e-12 inside logarithms and ``0 * log 0`` is taken as 0, so every
measure is finite on valid input.
"""

from __future__ import annotations

import math

import numpy as np

from .validation import as_prob_vector, check_base

__all__ = [
    "LN2",
    "LOG_EPS",
    "entropy",
    "cross_entropy",
    "kl_divergence",
    "entropy_gap_bounds",
    "convert",
]

LN2 = math.log(2.0)

# Probabilities are clamped to this floor inside any logarithm.
LOG_EPS = 1e-12


def _from_nats(value: float, base: str) -> float:
    return value / LN2 if base == "bits" else value


def convert(value: float, src: str, dst: str) -> float:
    """Convert an information value between bases.

    Exact multiplication or division by ``ln 2``; identity when the bases
    match.

    Parameters
    ----------
    value : float
        Quantity to convert.
    src, dst : str
        Source and destination base, each ``"bits"`` or ``"nats"``.
    """
    check_base(src)
    check_base(dst)
    if src == dst:
        return float(value)
    if src == "nats":
        return float(value) / LN2
    return float(value) * LN2


def entropy(p, base: str = "nats") -> float:
    """Entropy -sum_c p_c log p_c of a finite distribution.

    Parameters
    ----------
    p : array_like
        Probability vector over C classes.
    base : str
        ``"bits"`` or ``"nats"``.

    Returns
    -------
    float
        Value in [0, log C].
    """
    check_base(base)
    pv = as_prob_vector(p, "p")
    logs = np.log(np.clip(pv, LOG_EPS, None))
    h = -float(np.dot(pv, logs))
    return _from_nats(max(0.0, h), base)


def cross_entropy(p, q, base: str = "nats") -> float:
    """Cross entropy sum_c p_c log(1/q_c).

    q entries are clamped below at 1e-12 before the log; terms with p_c = 0
    contribute nothing regardless of q_c.
    """
    check_base(base)
    pv = as_prob_vector(p, "p")
    qv = as_prob_vector(q, "q")
    if pv.shape != qv.shape:
        raise ValueError(f"p and q must have equal length, got {pv.size} and {qv.size}")
    logs = np.log(np.clip(qv, LOG_EPS, None))
    ce = -float(np.dot(pv, logs))
    return _from_nats(max(0.0, ce), base)


def kl_divergence(p, q, base: str = "nats") -> float:
    """Divergence sum_c p_c log(p_c / q_c) >= 0.

    Computed as cross_entropy(p, q) - entropy(p) and floored at 0 to absorb
    rounding noise at p = q.
    """
    check_base(base)
    pv = as_prob_vector(p, "p")
    qv = as_prob_vector(q, "q")
    if pv.shape != qv.shape:
        raise ValueError(f"p and q must have equal length, got {pv.size} and {qv.size}")
    ce = cross_entropy(pv, qv, "nats")
    h = entropy(pv, "nats")
    return _from_nats(max(0.0, ce - h), base)


def entropy_gap_bounds(p, p_hat, base: str = "nats") -> tuple[float, float]:
    """Bracket the entropy gap H(p) - H(p_hat) by two residual-weighted sums.

    With R(c) = p_c - p_hat_c, returns

        (sum_c R(c) log(1/p_c), sum_c R(c) log(1/p_hat_c)),

    which satisfy lower <= H(p) - H(p_hat) <= upper with equality iff
    p = p_hat. The cross-entropy clamping policy applies inside the logs.

    Returns
    -------
    (float, float)
        Lower and upper bound in the requested base.
    """
    check_base(base)
    pv = as_prob_vector(p, "p")
    qv = as_prob_vector(p_hat, "p_hat")
    if pv.shape != qv.shape:
        raise ValueError(
            f"p and p_hat must have equal length, got {pv.size} and {qv.size}"
        )
    r = pv - qv
    neg_log_p = -np.log(np.clip(pv, LOG_EPS, None))
    neg_log_q = -np.log(np.clip(qv, LOG_EPS, None))
    lower = float(np.dot(r, neg_log_p))
    upper = float(np.dot(r, neg_log_q))
    return _from_nats(lower, base), _from_nats(upper, base)
