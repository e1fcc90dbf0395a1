"""Classical baselines: direct binomial estimation and the geometric
exponential family in natural coordinates.

The geometric family P_theta(k) = (e^theta - 1)/(e^{theta(n+1)} - 1) e^{theta k}
on k = 0..n is an exponential family with natural parameter theta = log r, so
the estimator k is exactly unbiased for the expectation parameter and its
variance equals the Fisher information of theta.
"""

from __future__ import annotations

import math

import numpy as np

SMALL_THETA_SCALE = 0.05


def geometric_pmf(n: int, theta: float) -> np.ndarray:
    """P_theta(k) for k = 0..n, computed shift-normalized (no overflow)."""
    k = np.arange(n + 1, dtype=float)
    logw = theta * k
    w = np.exp(logw - logw.max())
    return w / w.sum()


def geometric_moments(n: int, theta: float) -> tuple[float, float]:
    """Exact-sum mean and variance of k under P_theta."""
    p = geometric_pmf(n, theta)
    k = np.arange(n + 1, dtype=float)
    mean = float(np.sum(k * p))
    var = float(np.sum((k - mean) ** 2 * p))
    return mean, var


def expectation_parameter(n: int, theta: float) -> float:
    """Closed-form mean of k; n/2 at theta = 0 (uniform limit).

    For theta > 0 the expression is rewritten through e^{-theta(n+1)} so the
    exponentials stay bounded.
    """
    if theta == 0.0:
        return n / 2
    if theta > 0:
        eps = math.exp(-theta * (n + 1))
        return (n + eps) / (1.0 - eps) - 1.0 / math.expm1(theta)
    rn = math.exp(theta * (n + 1))
    return (n * rn + 1.0) / (rn - 1.0) - 1.0 / math.expm1(theta)


def natural_fisher(n: int, theta: float) -> float:
    """Fisher information of the natural parameter, d eta / d theta.

    Differentiating the closed-form mean gives

        F_theta = 1/(4 sinh^2(theta/2)) - (n+1)^2/(4 sinh^2(theta(n+1)/2)),

    which equals the variance of k (exponential-family identity).  Near
    theta = 0 the two diverging 1/theta^2 halves cancel, so below a scale
    threshold the even series in theta takes over (exact value n(n+2)/12 at
    theta = 0, the uniform variance).
    """
    m = n + 1.0
    scale = abs(theta) * m
    if scale < SMALL_THETA_SCALE:
        return (
            (m * m - 1.0) / 12.0
            - theta * theta * (m**4 - 1.0) / 240.0
            + theta**4 * (m**6 - 1.0) / 1512.0
        )
    a = math.sinh(theta / 2.0)
    b = math.sinh(theta * m / 2.0)
    return 1.0 / (4.0 * a * a) - m * m / (4.0 * b * b)


def binomial_mse(n: int, p: float) -> float:
    """Mean squared error p(1-p)/n of the relative-frequency estimator k/n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    return p * (1.0 - p) / n


def binomial_estimator_moments(n: int, p: float) -> tuple[float, float]:
    """Exact-sum mean and MSE of k/n under Binomial(n, p).

    Brute-force summation over all outcomes; serves as the independent check
    that the estimator is unbiased with MSE p(1-p)/n.
    """
    k = np.arange(n + 1, dtype=float)
    log_binom = np.concatenate(
        ([0.0], np.cumsum(np.log(n - np.arange(n)) - np.log(np.arange(n) + 1)))
    ) if n > 0 else np.zeros(1)
    logw = log_binom + k * math.log(p) + (n - k) * math.log1p(-p)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    est = k / n
    mean = float(np.sum(est * w))
    mse = float(np.sum((est - p) ** 2 * w))
    return mean, mse
