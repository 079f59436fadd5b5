"""Binary Gaussian data model: sampling, exact posteriors, closed-form
mutual-information bounds, quadratic-form expectations, and two independent
mutual-information oracles (Monte Carlo and 1-D quadrature).

The model draws a label y in {-1, +1} with P(Y = -1) = q, then a feature
vector x ~ N(y*mu, Sigma). Densities are evaluated in log space through the
Cholesky factor of Sigma; no explicit matrix inverse is ever formed.

The closed-form bounds implemented by :func:`mi_bounds` are linear in the
separation mu^T Sigma^-1 mu; the lower expression exceeds the hard cap
I(X;Y) <= H(Y) once the separation is large, so it is reported but never
trusted. See DISCREPANCIES.md for the measured gap against the oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_triangular
from scipy.special import expit, xlogy

from .validation import NumericError, check_finite_array

__all__ = [
    "GaussBinaryModel",
    "sample",
    "posterior",
    "posterior_complement",
    "mi_bounds",
    "quad_form_expectation",
    "mc_mi",
    "quadrature_mi_1d",
    "quadrature_mi_1d_routes",
    "label_entropy_nats",
]

_SYM_TOL = 1e-9


@dataclass(frozen=True)
class GaussBinaryModel:
    """Parameters (q, mu, Sigma) of the binary Gaussian data model.

    Parameters
    ----------
    q : float
        P(Y = -1), strictly inside (0, 1).
    mu : array_like
        Class mean direction; scalar or length-n vector.
    sigma : array_like
        Covariance; scalar variance (1-D model) or symmetric
        positive-definite n x n matrix.
    """

    q: float
    mu: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    chol: np.ndarray = field(repr=False, compare=False)

    def __init__(self, q: float, mu, sigma) -> None:
        qf = float(q)
        if not 0.0 < qf < 1.0:
            raise ValueError(f"q must lie strictly in (0, 1), got {q!r}")
        mu_arr = np.atleast_1d(check_finite_array(mu, "mu"))
        if mu_arr.ndim != 1:
            raise ValueError(f"mu must be a vector, got shape {mu_arr.shape}")
        n = mu_arr.size
        sig = check_finite_array(sigma, "sigma")
        if sig.ndim == 0:
            sig = sig.reshape(1, 1)
        if sig.shape != (n, n):
            raise ValueError(f"sigma must be {n}x{n}, got shape {sig.shape}")
        if np.max(np.abs(sig - sig.T), initial=0.0) > _SYM_TOL:
            raise ValueError("sigma must be symmetric within 1e-9")
        try:
            chol = np.linalg.cholesky(sig)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"sigma is not positive definite: {exc}") from exc
        object.__setattr__(self, "q", qf)
        object.__setattr__(self, "mu", mu_arr)
        object.__setattr__(self, "sigma", sig)
        object.__setattr__(self, "chol", chol)

    @property
    def n(self) -> int:
        """Feature dimension."""
        return self.mu.size

    def separation(self) -> float:
        """The quadratic separation mu^T Sigma^-1 mu via the factorization."""
        u = solve_triangular(self.chol, self.mu, lower=True)
        return float(u @ u)


def label_entropy_nats(model: GaussBinaryModel) -> float:
    """H(Y) in nats for the model's label distribution (q, 1-q)."""
    q = model.q
    return float(-(q * math.log(q) + (1.0 - q) * math.log(1.0 - q)))


def _rng(seed: int, stream: tuple[int, ...] = (0,)) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=stream))
    )


def sample(model: GaussBinaryModel, n_samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw labeled samples from the model.

    Labels come first from one uniform block, then one standard-normal block
    drives the features, so the stream layout is fixed and equal seeds give
    identical draws.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        Features of shape (n_samples, n) and int8 labels in {-1, +1}.
    """
    count = int(n_samples)
    if count < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples!r}")
    rng = _rng(seed)
    labels = np.where(rng.random(count) < model.q, -1, 1).astype(np.int8)
    z = rng.standard_normal((count, model.n))
    x = labels[:, None] * model.mu[None, :] + z @ model.chol.T
    return x, labels


def _log_odds(model: GaussBinaryModel, x: np.ndarray) -> np.ndarray:
    # log [ (1-q) N(x; mu) / (q N(x; -mu)) ] = 2 x^T Sigma^-1 mu + log((1-q)/q);
    # the quadratic pieces of the two exponents cancel.
    u = solve_triangular(model.chol, model.mu, lower=True)
    w = solve_triangular(model.chol.T, u, lower=False)
    return 2.0 * (x @ w) + math.log((1.0 - model.q) / model.q)


def _as_batch(model: GaussBinaryModel, x) -> tuple[np.ndarray, bool]:
    arr = check_finite_array(x, "x")
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
        return arr, True
    if arr.ndim == 1:
        if model.n == 1:
            return arr.reshape(-1, 1), arr.size == 1
        if arr.size != model.n:
            raise ValueError(f"x has dimension {arr.size}, model expects {model.n}")
        return arr.reshape(1, -1), True
    if arr.ndim == 2:
        if arr.shape[1] != model.n:
            raise ValueError(f"x has dimension {arr.shape[1]}, model expects {model.n}")
        return arr, False
    raise ValueError(f"x must be at most 2-D, got shape {arr.shape}")


def posterior(model: GaussBinaryModel, x):
    """P(Y = +1 | x), computed from the log-density difference.

    Accepts a single point or a batch of rows; returns a float or an array
    correspondingly. In one dimension with unit variance this reduces to
    logistic(2*mu*x + log((1-q)/q)).
    """
    batch, scalar = _as_batch(model, x)
    p = expit(_log_odds(model, batch))
    return float(p[0]) if scalar else p


def posterior_complement(model: GaussBinaryModel, x):
    """P(Y = -1 | x); together with :func:`posterior` sums to 1."""
    batch, scalar = _as_batch(model, x)
    p = expit(-_log_odds(model, batch))
    return float(p[0]) if scalar else p


def mi_bounds(model: GaussBinaryModel) -> tuple[float, float]:
    """Closed-form bounds on I(X;Y) in nats, linear in the separation.

    Returns ``(2*min(q,1-q)*m, 4*q*(1-q)*m)`` with m = mu^T Sigma^-1 mu.
    The upper expression holds everywhere; the lower expression exceeds
    H(Y) <= ln 2 for large m and must not be asserted (see DISCREPANCIES.md).
    """
    m = model.separation()
    q = model.q
    return 2.0 * min(q, 1.0 - q) * m, 4.0 * q * (1.0 - q) * m


def quad_form_expectation(a, mu, sigma, shift: str = "none") -> float:
    """Expected quadratic form for X ~ N(mu, Sigma).

    ``shift`` selects the integrand: ``"none"`` gives E[X^T A X] =
    Tr(A Sigma) + mu^T A mu; ``"minus_mu"`` gives E[(X-mu)^T A (X-mu)] =
    Tr(A Sigma); ``"plus_mu"`` gives E[(X+mu)^T A (X+mu)] =
    Tr(A Sigma) + 4 mu^T A mu.
    """
    if shift not in ("none", "minus_mu", "plus_mu"):
        raise ValueError(f"shift must be 'none', 'minus_mu' or 'plus_mu', got {shift!r}")
    a_arr = check_finite_array(a, "a")
    mu_arr = np.atleast_1d(check_finite_array(mu, "mu"))
    sig = check_finite_array(sigma, "sigma")
    if sig.ndim == 0:
        sig = sig.reshape(1, 1)
    n = mu_arr.size
    if a_arr.shape != (n, n):
        raise ValueError(f"a must be {n}x{n}, got shape {a_arr.shape}")
    if sig.shape != (n, n):
        raise ValueError(f"sigma must be {n}x{n}, got shape {sig.shape}")
    trace_term = float(np.trace(a_arr @ sig))
    if shift == "minus_mu":
        return trace_term
    quad = float(mu_arr @ a_arr @ mu_arr)
    if shift == "none":
        return trace_term + quad
    return trace_term + 4.0 * quad


def _mahalanobis_sq(model: GaussBinaryModel, x: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = x - center[None, :]
    u = solve_triangular(model.chol, diff.T, lower=True)
    return np.sum(u * u, axis=0)


def mc_mi(model: GaussBinaryModel, n_samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of I(X;Y) in nats with its standard error.

    Averages log[p(x|y) / p_X(x)] over joint samples, with the marginal
    p_X the two-component mixture evaluated by log-sum-exp. The shared
    Gaussian normalization constant cancels inside the ratio.

    Returns
    -------
    (float, float)
        Estimate and stderr = sample standard deviation / sqrt(N).
    """
    count = int(n_samples)
    if count < 1000:
        raise ValueError(f"n_samples must be >= 1000, got {n_samples!r}")
    x, labels = sample(model, count, seed)
    m_plus = _mahalanobis_sq(model, x, model.mu)
    m_minus = _mahalanobis_sq(model, x, -model.mu)
    q = model.q
    log_mix = np.logaddexp(
        math.log(1.0 - q) - 0.5 * m_plus, math.log(q) - 0.5 * m_minus
    )
    m_own = np.where(labels == 1, m_plus, m_minus)
    t = -0.5 * m_own - log_mix
    estimate = float(np.mean(t))
    stderr = float(np.std(t, ddof=1) / math.sqrt(count))
    return estimate, stderr


def _quadrature_routes(model: GaussBinaryModel, half_width, n_points) -> tuple[float, float]:
    sigma2 = float(model.sigma[0, 0])
    sigma_std = math.sqrt(sigma2)
    mu = float(model.mu[0])
    q = model.q
    if half_width is None:
        hw = abs(mu) + 12.0 * sigma_std
    else:
        hw = float(half_width)
        if hw < abs(mu) + 8.0 * sigma_std:
            raise ValueError(
                "half_width must cover at least 8 standard deviations beyond |mu|"
            )
    pts = int(n_points)
    if pts < 10_000:
        raise ValueError(f"n_points must be >= 10000, got {n_points!r}")
    x = np.linspace(-hw, hw, pts)

    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma2)
    p_plus = norm * np.exp(-0.5 * (x - mu) ** 2 / sigma2)
    p_minus = norm * np.exp(-0.5 * (x + mu) ** 2 / sigma2)
    p_mix = (1.0 - q) * p_plus + q * p_minus

    # Label route: I = H(Y) - integral of p_X(x) H_b(posterior(x)).
    post = expit(_log_odds(model, x.reshape(-1, 1)))
    h_cond = -(xlogy(post, post) + xlogy(1.0 - post, 1.0 - post))
    h_y_given_x = float(simpson(p_mix * h_cond, x=x))
    route_label = label_entropy_nats(model) - h_y_given_x

    # Feature route: I = h(X) - h(X|Y) with h(X|Y) = 0.5 ln(2 pi e sigma^2).
    h_x = float(simpson(-xlogy(p_mix, p_mix), x=x))
    h_x_given_y = 0.5 * math.log(2.0 * math.pi * math.e * sigma2)
    route_feature = h_x - h_x_given_y
    return route_label, route_feature


def quadrature_mi_1d_routes(
    model: GaussBinaryModel, half_width=None, n_points: int = 200_001
) -> tuple[float, float]:
    """Both deterministic quadrature routes to I(X;Y) in nats.

    Returns the label route H(Y) - H(Y|X) and the feature route
    h(X) - h(X|Y); on a valid model the two agree to high precision, which
    is itself a tested identity.
    """
    if model.n != 1:
        raise ValueError(f"quadrature oracle requires a 1-D model, got n={model.n}")
    return _quadrature_routes(model, half_width, n_points)


def quadrature_mi_1d(
    model: GaussBinaryModel, half_width=None, n_points: int = 200_001
) -> float:
    """Deterministic quadrature value of I(X;Y) in nats for a 1-D model.

    Computes both integration routes and raises the numeric-failure error if
    they disagree beyond 1e-6; returns the label-route value.
    """
    route_label, route_feature = quadrature_mi_1d_routes(model, half_width, n_points)
    if abs(route_label - route_feature) > 1e-6:
        raise NumericError(
            "quadrature routes disagree: "
            f"{route_label!r} vs {route_feature!r}"
        )
    return route_label
