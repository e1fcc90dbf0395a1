"""Spin-j operator algebra: ladder and angular momentum matrices, Hermitian
matrix exponentials, and the coupled-basis projectors for spin-1/2 x spin-j.

Basis convention used everywhere: the spin-j space of n bosons (j = n/2) is
indexed by k = 0..n with magnetic number m = k - j, strictly ascending.  In
the two-mode picture k counts bosons in the second mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class SpinSystem:
    """An n-boson two-mode sector, equivalently a spin j = n/2 irrep."""

    n: int

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError(f"boson count must be a nonnegative integer, got {self.n}")

    @property
    def j(self) -> float:
        return self.n / 2

    @property
    def dim(self) -> int:
        return self.n + 1

    def m_values(self) -> np.ndarray:
        """Magnetic numbers -j..j, ascending, aligned with the basis index."""
        return np.arange(self.dim) - self.j


@dataclass(frozen=True, eq=False)
class CouplingProjectors:
    """Projectors onto the total-spin j+1/2 and j-1/2 blocks of H_1/2 x H_j."""

    p_plus: np.ndarray
    p_minus: np.ndarray


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= tol * max(1.0, np.max(np.abs(a))))


def ladder_plus(sys: SpinSystem) -> np.ndarray:
    """Raising operator: couples m to m+1 with weight sqrt((j-m)(j+m+1))."""
    j = sys.j
    m = np.arange(sys.dim - 1) - j
    out = np.zeros((sys.dim, sys.dim), dtype=complex)
    out[np.arange(1, sys.dim), np.arange(sys.dim - 1)] = np.sqrt((j - m) * (j + m + 1))
    return out


def angular_momentum(sys: SpinSystem, axis: int) -> np.ndarray:
    """Angular momentum component J_1, J_2 or J_3 (J_3 diagonal in m)."""
    if axis == 3:
        return np.diag(sys.m_values()).astype(complex)
    jp = ladder_plus(sys)
    jm = jp.conj().T
    if axis == 1:
        return (jp + jm) / 2
    if axis == 2:
        return (jp - jm) / 2j
    raise ValueError(f"axis must be 1, 2 or 3, got {axis}")


def casimir(sys: SpinSystem) -> np.ndarray:
    """J_1^2 + J_2^2 + J_3^2, evaluated by matrix products.

    Equals j(j+1) times the identity; the identity is not assumed here so the
    result can serve as a consistency check on the generators.
    """
    out = np.zeros((sys.dim, sys.dim), dtype=complex)
    for axis in (1, 2, 3):
        jk = angular_momentum(sys, axis)
        out += jk @ jk
    return out


def exp_i_hermitian(h: np.ndarray) -> np.ndarray:
    """exp(i h) for Hermitian h, via spectral decomposition.

    Eigenvalues are exponentiated on the unit circle, so the result is
    unitary up to eigensolver accuracy.
    """
    if not is_hermitian(h):
        raise ValueError("generator not Hermitian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def coupling_projectors(sys: SpinSystem, allow_degenerate: bool = False) -> CouplingProjectors:
    """Projectors onto the two total-spin blocks of H_1/2 x H_j.

    Tensor ordering is spin-1/2 first (index s in {0: down, 1: up}), spin-j
    second, with the product basis index s*(n+1) + k.  The coupled basis is
    built from the real nonnegative (Condon-Shortley) coefficients

        |j+1/2; m+1/2> = sqrt((j+m+1)/(2j+1)) |up>|j;m>
                       + sqrt((j-m)/(2j+1))   |down>|j;m+1>

    and the orthogonal combination for total spin j-1/2.
    """
    n = sys.n
    if n == 0:
        if not allow_degenerate:
            raise ValueError("no lower coupled space")
        return CouplingProjectors(np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex))
    j = sys.j
    dim = sys.dim
    two = 2 * dim
    denom = 2 * j + 1

    p_plus = np.zeros((two, two), dtype=complex)
    # k ranges over j + m; k = -1 and k = n give the stretched edge states.
    for k in range(-1, n + 1):
        m = k - j
        v = np.zeros(two, dtype=complex)
        if k >= 0:
            v[dim + k] = np.sqrt((j + m + 1) / denom)
        if k + 1 <= n:
            v[k + 1] = np.sqrt((j - m) / denom)
        p_plus += np.outer(v, v.conj())

    p_minus = np.zeros((two, two), dtype=complex)
    for k in range(n):
        m = k - j
        v = np.zeros(two, dtype=complex)
        v[dim + k] = -np.sqrt((j - m) / denom)
        v[k + 1] = np.sqrt((j + m + 1) / denom)
        p_minus += np.outer(v, v.conj())

    return CouplingProjectors(p_plus, p_minus)


def coherent_top_amplitudes(sys: SpinSystem, polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
    """Amplitudes of the rotated highest-weight state, one row per direction.

    Row g is the coefficient vector of exp(i(t1 J_1 + t2 J_2)) |j;j> in the
    ascending-m basis, where (t1, t2) has polar angle ``polar[g]`` and
    fidelity azimuth ``azimuth[g]``.  Closed binomial form, no matrix
    exponential; cross-checked against exp_i_hermitian in the test suite.
    """
    polar = np.atleast_1d(np.asarray(polar, dtype=float))
    azimuth = np.atleast_1d(np.asarray(azimuth, dtype=float))
    n = sys.n
    k = np.arange(n + 1)  # number of lowering steps from the top state
    log_binom = np.concatenate(
        ([0.0], np.cumsum(np.log(n - np.arange(n)) - np.log(np.arange(n) + 1)))
    ) if n > 0 else np.zeros(1)
    c = np.cos(polar / 2)[:, None]
    s = np.sin(polar / 2)[:, None]
    phase = (1j * np.exp(-1j * azimuth))[:, None] ** k[None, :]
    amps = np.exp(0.5 * log_binom)[None, :] * c ** (n - k)[None, :] * s ** k[None, :] * phase
    out = np.zeros_like(amps)
    out[:, n - k] = amps  # m = j - k sits at basis index n - k
    return out
