"""Closed-form lower bounds on classification error probability.

The central bound maps the label entropy H(Y) and the mutual information
I(X;Y), both in bits, to a lower bound on the error probability of any
classifier:

    P_e >= max(0, (2 + H - I - a) / 4),   a = sqrt((H - I - 2)^2 + 4).

It is derived through the quadratic overestimate of the binary entropy
function (:func:`binary_entropy_quadratic_bound`), which is valid only in
bits; hence the explicit unit bridge in :func:`gauss_error_lower_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gauss import GaussBinaryModel, mi_bounds
from .info import convert, entropy

__all__ = [
    "BoundPoint",
    "fano_lower_bound",
    "binary_entropy_quadratic_bound",
    "gauss_error_lower_bound",
    "classical_fano_lower_bound",
    "bound_curve",
]


@dataclass(frozen=True)
class BoundPoint:
    """One row of a bound curve: (I, H(Y), error lower bound) in bits."""

    mi_bits: float
    h_y_bits: float
    lower_bound: float


def fano_lower_bound(h_y_bits: float, mi_bits: float) -> float:
    """Error-probability lower bound from label entropy and MI, in bits.

    Parameters
    ----------
    h_y_bits : float
        Label entropy H(Y) >= 0 in bits.
    mi_bits : float
        Mutual information I(X;Y) >= 0 in bits.

    Returns
    -------
    float
        max(0, (2 + H - I - a)/4) with a = sqrt((H - I - 2)^2 + 4);
        always in [0, 1).
    """
    h = float(h_y_bits)
    i = float(mi_bits)
    if h < 0.0:
        raise ValueError(f"h_y_bits must be >= 0, got {h_y_bits!r}")
    if i < 0.0:
        raise ValueError(f"mi_bits must be >= 0, got {mi_bits!r}")
    a = math.sqrt((h - i - 2.0) ** 2 + 4.0)
    return max(0.0, (2.0 + h - i - a) / 4.0)


def binary_entropy_quadratic_bound(x: float) -> float:
    """Quadratic overestimate 1 - 2(x - 1/2)^2 of the binary entropy in bits.

    Dominates H_b(x) for every x in [0, 1], with equality only at x = 1/2.
    """
    xf = float(x)
    if not 0.0 <= xf <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    return 1.0 - 2.0 * (xf - 0.5) ** 2


def gauss_error_lower_bound(model: GaussBinaryModel) -> float:
    """Error lower bound for the binary Gaussian model.

    Uses H(Y) = H_b(q) in bits and the closed-form MI upper bound
    4q(1-q) mu^T Sigma^-1 mu, converted from nats to bits before entering
    :func:`fano_lower_bound`. Substituting the upper bound preserves
    validity because the bound is non-increasing in I.
    """
    h_bits = entropy([model.q, 1.0 - model.q], base="bits")
    _, upper_nats = mi_bounds(model)
    i_bits = convert(upper_nats, "nats", "bits")
    return fano_lower_bound(h_bits, i_bits)


def classical_fano_lower_bound(h_y_bits: float, mi_bits: float, n_classes: int) -> float:
    """Weak classical form max(0, (H - I - 1)/log2(C-1)), informational only.

    Defined as 0 for C = 2, where the linearized classical inequality has no
    valid closed form. Emitted alongside curve rows for comparison; never
    asserted against.
    """
    if int(n_classes) < 3:
        return 0.0
    return max(0.0, (float(h_y_bits) - float(mi_bits) - 1.0) / math.log2(int(n_classes) - 1))


def bound_curve(n_classes: int, mi_grid, skew: float | None = None) -> list[BoundPoint]:
    """Bound-curve rows over a grid of MI values in bits.

    Parameters
    ----------
    n_classes : int
        Label cardinality C >= 2.
    mi_grid : sequence of float
        Non-negative MI values in bits; one output row per value.
    skew : float, optional
        Dominant class mass p0 in (1/C, 1). When given, H(Y) is the entropy
        of (p0, (1-p0)/(C-1), ...); otherwise labels are uniform and
        H(Y) = log2 C.
    """
    c = int(n_classes)
    if c < 2:
        raise ValueError(f"n_classes must be >= 2, got {n_classes!r}")
    if skew is None:
        h_bits = math.log2(c)
    else:
        p0 = float(skew)
        if not 1.0 / c < p0 < 1.0:
            raise ValueError(
                f"skew must lie in (1/{c}, 1), got {skew!r}"
            )
        rest = (1.0 - p0) / (c - 1)
        h_bits = entropy([p0] + [rest] * (c - 1), base="bits")
    points = []
    for value in mi_grid:
        i_bits = float(value)
        if i_bits < 0.0:
            raise ValueError(f"mi grid values must be >= 0, got {value!r}")
        points.append(
            BoundPoint(
                mi_bits=i_bits,
                h_y_bits=h_bits,
                lower_bound=fano_lower_bound(h_bits, i_bits),
            )
        )
    return points
