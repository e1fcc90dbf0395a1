"""Diagonal state families on a spin-j system, their rotated orbits, and the
fidelity geometry of the two-angle parameter space.

Parameter convention: a point theta = (theta1, theta2) with |theta| <= pi
generates U_theta = exp(i(theta1 J_1 + theta2 J_2)).  The derived azimuth phi
satisfies e^{-i phi} |theta| = theta1 + i theta2, with phi = 0 at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spin import SpinSystem, angular_momentum, exp_i_hermitian

WEIGHT_SUM_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    """Nonnegative weights p_m over m = -j..j (ascending), summing to one."""

    sys: SpinSystem
    weights: np.ndarray
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.sys.dim,):
            raise ValueError(f"expected {self.sys.dim} weights, got shape {w.shape}")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class ParamPoint:
    """A point of the two-angle parameter space, |theta| <= pi."""

    theta1: float
    theta2: float

    def __post_init__(self):
        if self.radius > math.pi + 1e-12:
            raise ValueError(f"|theta| = {self.radius} exceeds pi")

    @property
    def radius(self) -> float:
        return math.hypot(self.theta1, self.theta2)

    @property
    def azimuth(self) -> float:
        """phi with e^{-i phi}|theta| = theta1 + i theta2; zero at the origin."""
        if self.radius == 0.0:
            return 0.0
        return -math.atan2(self.theta2, self.theta1)


@dataclass(frozen=True, eq=False)
class DensityState:
    """A density matrix attached to a spin system (trace one, PSD, Hermitian)."""

    sys: SpinSystem
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.sys.dim, self.sys.dim):
            raise ValueError(f"expected a {self.sys.dim}x{self.sys.dim} matrix")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {np.trace(m)!r}")
        if np.max(np.abs(m - m.conj().T)) > TRACE_TOL:
            raise ValueError("density matrix must be Hermitian")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValueError("density matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", m)

    def is_diagonal(self, tol: float = 1e-10) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.max(np.abs(off)) <= tol)


def binomial_weights(sys: SpinSystem, p: float) -> WeightDistribution:
    """Binomial weights p_m = C(n, j+m) p^(j+m) (1-p)^(j-m).

    Computed in log space so large n (thousands) neither overflows the
    binomial coefficients nor loses the tails to premature underflow.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    n = sys.n
    k = np.arange(n + 1)
    log_binom = np.concatenate(
        ([0.0], np.cumsum(np.log(n - np.arange(n)) - np.log(np.arange(n) + 1)))
    ) if n > 0 else np.zeros(1)
    logw = log_binom + k * math.log(p) + (n - k) * math.log1p(-p)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    return WeightDistribution(sys, w, "binomial", {"p": float(p)})


def geometric_weights(sys: SpinSystem, r: float) -> WeightDistribution:
    """Geometric weights with ratio p_{m+1}/p_m = r, normalized.

    For r > 1 the terms are expressed relative to the largest one (powers of
    1/r), keeping every intermediate below 1 regardless of n.
    """
    if r <= 0 or r == 1.0:
        raise ValueError(f"r must be positive and different from 1, got {r}")
    k = np.arange(sys.dim, dtype=float)
    if r > 1:
        w = np.power(1.0 / r, k[::-1])
    else:
        w = np.power(r, k)
    w /= w.sum()
    return WeightDistribution(sys, w, "geometric", {"r": float(r)})


def delta_weights(sys: SpinSystem, a: float) -> WeightDistribution:
    """Point mass at m = a; a + j must be an integer index in 0..n."""
    idx = a + sys.j
    if abs(idx - round(idx)) > 1e-9 or not 0 <= round(idx) <= sys.n:
        raise ValueError(f"a = {a} is not on the m grid of a spin-{sys.j} system")
    w = np.zeros(sys.dim)
    w[int(round(idx))] = 1.0
    return WeightDistribution(sys, w, "delta", {"a": float(a)})


def custom_weights(sys: SpinSystem, values) -> WeightDistribution:
    """Arbitrary user weights, validated and tagged as custom."""
    return WeightDistribution(sys, np.asarray(values, dtype=float), "custom", {})


def diagonal_state(w: WeightDistribution) -> DensityState:
    """The diagonal density matrix sum_m p_m |j;m><j;m|."""
    return DensityState(w.sys, np.diag(w.weights.astype(complex)))


def evolved_state(rho: DensityState, theta: ParamPoint) -> DensityState:
    """U_theta rho U_theta^dagger with U_theta = exp(i(theta1 J1 + theta2 J2))."""
    h = theta.theta1 * angular_momentum(rho.sys, 1) + theta.theta2 * angular_momentum(rho.sys, 2)
    u = exp_i_hermitian(h)
    return DensityState(rho.sys, u @ rho.matrix @ u.conj().T)


def fidelity_point(theta: ParamPoint, theta_hat: ParamPoint) -> float:
    """Squared overlap of the two rotated spin-1/2 reference states.

    |cos(|t|/2)cos(|t'|/2) + e^{i(phi' - phi)} sin(|t|/2)sin(|t'|/2)|^2,
    symmetric in its arguments and equal to cos^2(|t'|/2) at theta = 0.
    """
    a, b = theta.radius / 2, theta_hat.radius / 2
    z = math.cos(a) * math.cos(b) + np.exp(1j * (theta_hat.azimuth - theta.azimuth)) * math.sin(a) * math.sin(b)
    return float(abs(z) ** 2)


def error_function_point(theta_hat: ParamPoint) -> float:
    """Pointwise error 4(1 - fidelity to the origin) = 4 sin^2(|theta|/2)."""
    return 4.0 * math.sin(theta_hat.radius / 2) ** 2


def bloch_point(theta: ParamPoint) -> np.ndarray:
    """Unit sphere image of theta; fidelity_point(a, b) = (1 + v_a . v_b)/2."""
    t, phi = theta.radius, theta.azimuth
    return np.array([math.sin(t) * math.cos(phi), math.sin(t) * math.sin(phi), math.cos(t)])


def param_from_bloch(v) -> ParamPoint:
    """Inverse of bloch_point (azimuth of the north pole fixed to zero)."""
    x, y, z = v
    t = math.acos(min(1.0, max(-1.0, z)))
    phi = math.atan2(y, x) if t > 0 else 0.0
    return ParamPoint(t * math.cos(phi), -t * math.sin(phi))
