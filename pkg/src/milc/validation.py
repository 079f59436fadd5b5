"""Shared input-validation helpers and error types.

Validation failures raise :class:`ValueError` (or a subclass); numeric
breakdowns that occur on structurally valid input raise
:class:`NumericError`. The CLI maps these families onto distinct exit codes.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "NumericError",
    "as_prob_vector",
    "as_prob_matrix",
    "check_base",
    "check_finite_array",
    "check_labels",
]

# Sum tolerance under which a near-normalized vector is renormalized rather
# than rejected.
_SUM_TOL = 1e-6


class NumericError(RuntimeError):
    """Numeric failure on structurally valid input (overflow, divergence,
    failed factorization, non-finite training loss)."""


def check_base(base: str) -> str:
    """Validate a log-base selector.

    Parameters
    ----------
    base : str
        Either ``"bits"`` or ``"nats"``.

    Returns
    -------
    str
        The validated selector.
    """
    if base not in ("bits", "nats"):
        raise ValueError(f"base must be 'bits' or 'nats', got {base!r}")
    return base


def check_finite_array(x, name: str = "array") -> np.ndarray:
    """Coerce to a float64 array and require every entry to be finite."""
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def as_prob_vector(p, name: str = "p") -> np.ndarray:
    """Validate and return a probability vector as a 1-D float64 array.

    Entries must be non-negative and sum to 1 within 1e-6; a vector inside
    that tolerance is renormalized exactly to sum 1, anything further off is
    rejected as malformed.

    Parameters
    ----------
    p : array_like
        Candidate distribution over C >= 1 classes.
    name : str
        Name used in error messages.

    Returns
    -------
    numpy.ndarray
        Validated distribution, shape (C,).
    """
    arr = check_finite_array(p, name)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must have at least one class")
    if np.any(arr < 0):
        raise ValueError(f"{name} must be entrywise non-negative")
    total = float(arr.sum())
    if abs(total - 1.0) > _SUM_TOL:
        raise ValueError(f"{name} must sum to 1 (got {total!r})")
    if total != 1.0:
        arr = arr / total
    return arr


def as_prob_matrix(m, name: str = "m") -> np.ndarray:
    """Validate a batch of probability rows, shape (B, C), B >= 1.

    Each row must satisfy the probability-vector invariants; rows inside the
    normalization tolerance are renormalized.
    """
    arr = check_finite_array(m, name)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty in both dimensions")
    if np.any(arr < 0):
        raise ValueError(f"{name} must be entrywise non-negative")
    totals = arr.sum(axis=1)
    if np.any(np.abs(totals - 1.0) > _SUM_TOL):
        bad = int(np.argmax(np.abs(totals - 1.0)))
        raise ValueError(f"{name} row {bad} must sum to 1 (got {totals[bad]!r})")
    return arr / totals[:, None]


def check_labels(labels, n_classes: int, name: str = "labels") -> np.ndarray:
    """Validate integer class labels in [0, n_classes).

    Returns the labels as a 1-D int64 array with at least one entry.
    """
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must be non-empty")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = np.asarray(arr, dtype=np.int64)
        if not np.array_equal(as_int, arr):
            raise ValueError(f"{name} must be integers")
        arr = as_int
    arr = arr.astype(np.int64, copy=False)
    if int(n_classes) < 1:
        raise ValueError("n_classes must be >= 1")
    if np.any(arr < 0) or np.any(arr >= n_classes):
        raise ValueError(f"{name} must lie in [0, {n_classes})")
    return arr
