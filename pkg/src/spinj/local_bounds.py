"""Local estimation machinery: SLD and RLD solvers, Fisher matrices, the
commutation superoperator, and the Cramer-Rao-type scalar bounds.

All solvers work in the eigenbasis of the state.  The support convention for
rank-deficient states sets operator components on the kernel-kernel block to
zero; a derivative with weight on that block has no SLD and raises.

Sign and normalization conventions, fixed once here:

* SLD: D = (L rho + rho L)/2, Fisher F_ij = Tr L_i (L_j rho + rho L_j)/2.
* RLD: D = rho Ltil, Fisher Ftil_ij = Tr Ltil_i rho Ltil_j
  (equivalently Tr rho^{-1} D_i D_j, Hermitian by construction).
* Commutation superoperator: [rho, X] = (rho K(X) + K(X) rho)/2, which makes
  K(X) anti-Hermitian for Hermitian X.  The real antisymmetric matrix used in
  the bound formulas is D_jk = Tr[(-i) K(L_j) D_k]; with this normalization
  the D-invariant identity Ftil^{-1} = F^{-1} + (i/2) F^{-1} D F^{-1} holds
  exactly (machine precision) for the geometric family at every n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spin import angular_momentum
from .states import DensityState, WeightDistribution, diagonal_state

SUPPORT_RESIDUAL_TOL = 1e-10
FISHER_CONDITION_LIMIT = 1e12
CONSTRAINT_TOL = 1e-9
D_INVARIANCE_TOL = 1e-8

RLD_SINGULAR = "RLD_SINGULAR"


class ComputationError(RuntimeError):
    """A numerically well-posed request failed (singular Fisher matrix etc.)."""

    def __init__(self, message: str, reason: str = "COMPUTATION_FAILED"):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True, eq=False)
class ModelPoint:
    """A state together with one Hermitian derivative matrix per parameter."""

    rho: DensityState
    derivs: tuple

    def __post_init__(self):
        for d in self.derivs:
            if abs(np.trace(d)) > 1e-10:
                raise ValueError("derivative matrices must be traceless")
            if np.max(np.abs(d - d.conj().T)) > 1e-10:
                raise ValueError("derivative matrices must be Hermitian")


@dataclass(frozen=True, eq=False)
class FisherMatrices:
    sld: np.ndarray
    rld: Optional[np.ndarray] = None
    d_matrix: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class BoundsReport:
    """Scalar bounds and Fisher data for one model point and weight matrix."""

    weight: np.ndarray
    fisher: FisherMatrices
    sld_bound: float
    sld_upper: float
    hn_upper: float
    d_invariant: bool
    d_residual: float
    rld_bound: Optional[float] = None
    rld_reason: Optional[str] = None
    hn_d_invariant: Optional[float] = None


def _eigensystem(state: DensityState):
    """Eigenvalues/vectors of the state; exact for diagonal input.

    Diagonal states keep their entries verbatim (no eigensolver noise), which
    matters for families whose smallest weights sit far below the eigh
    floor of dim * eps yet are genuinely positive.
    """
    m = state.matrix
    if state.is_diagonal(tol=0.0):
        return np.diag(m).real.copy(), np.eye(state.sys.dim, dtype=complex), True
    w, v = np.linalg.eigh(m)
    return w, v, False


def _kernel_mask(w: np.ndarray, exact: bool) -> np.ndarray:
    if exact:
        return w <= 0.0
    return w <= len(w) * np.finfo(float).eps * max(w.max(), 0.0)


def sld_solve(state: DensityState, deriv: np.ndarray) -> np.ndarray:
    """Hermitian L with (L rho + rho L)/2 = deriv, under the support convention.

    In the eigenbasis of rho, L_ab = 2 D_ab / (p_a + p_b) wherever the
    denominator is positive and 0 on the kernel-kernel block; the derivative
    must vanish there for an SLD to exist.
    """
    w, v, exact = _eigensystem(state)
    dt = v.conj().T @ deriv @ v
    kernel = _kernel_mask(w, exact)
    denom = w[:, None] + w[None, :]
    off_support = np.outer(kernel, kernel)
    if np.any(off_support) and np.max(np.abs(dt[off_support])) > SUPPORT_RESIDUAL_TOL:
        raise ComputationError("derivative leaves support", reason="NO_SLD")
    lt = np.zeros_like(dt)
    ok = ~off_support
    lt[ok] = 2.0 * dt[ok] / denom[ok]
    return v @ lt @ v.conj().T


def rld_solve(state: DensityState, deriv: np.ndarray) -> np.ndarray:
    """Ltil = rho^{-1} deriv; defined only for full-rank states."""
    w, v, exact = _eigensystem(state)
    if np.any(_kernel_mask(w, exact)):
        raise ComputationError("RLD undefined for singular state", reason=RLD_SINGULAR)
    dt = v.conj().T @ deriv @ v
    return v @ (dt / w[:, None]) @ v.conj().T


def unitary_model(state: DensityState) -> ModelPoint:
    """Two-parameter rotation model around a diagonal state.

    Derivatives D_1 = i[rho, J_1] and D_2 = i[rho, J_2] at the origin.
    """
    if not state.is_diagonal():
        raise ValueError("the rotation model is anchored at a diagonal state")
    rho = state.matrix
    derivs = []
    for axis in (1, 2):
        jk = angular_momentum(state.sys, axis)
        derivs.append(1j * (rho @ jk - jk @ rho))
    return ModelPoint(state, tuple(derivs))


def sld_fisher(model: ModelPoint) -> tuple[np.ndarray, list]:
    """SLD Fisher matrix and the solved SLD operators."""
    ls = [sld_solve(model.rho, d) for d in model.derivs]
    rho = model.rho.matrix
    d = len(ls)
    f = np.zeros((d, d))
    for i in range(d):
        for k in range(i, d):
            val = 0.5 * np.trace(ls[i] @ (ls[k] @ rho + rho @ ls[k])).real
            f[i, k] = f[k, i] = val
    return f, ls


def rld_fisher(model: ModelPoint) -> np.ndarray:
    """RLD Fisher matrix Ftil_ij = Tr rho^{-1} D_i D_j (Hermitian, complex)."""
    state = model.rho
    w, v, exact = _eigensystem(state)
    if np.any(_kernel_mask(w, exact)):
        raise ComputationError("RLD undefined for singular state", reason=RLD_SINGULAR)
    dts = [v.conj().T @ d @ v for d in model.derivs]
    d = len(dts)
    f = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for k in range(d):
            f[i, k] = np.sum((dts[i] @ dts[k]).diagonal() / w)
    herm_defect = np.max(np.abs(f - f.conj().T))
    if herm_defect > 1e-10 * max(1.0, np.max(np.abs(f))):
        raise ComputationError(f"RLD Fisher matrix not Hermitian (defect {herm_defect:.3e})")
    return (f + f.conj().T) / 2


def commutation_superoperator(state: DensityState, x: np.ndarray) -> np.ndarray:
    """K(X) solving [rho, X] = (rho K + K rho)/2 under the support convention.

    In the eigenbasis, K_ab = 2 (p_a - p_b)/(p_a + p_b) X_ab, zero where the
    denominator vanishes.  Anti-Hermitian for Hermitian X.
    """
    w, v, exact = _eigensystem(state)
    xt = v.conj().T @ x @ v
    denom = w[:, None] + w[None, :]
    num = w[:, None] - w[None, :]
    kt = np.zeros_like(xt)
    ok = denom > 0
    kt[ok] = 2.0 * num[ok] / denom[ok] * xt[ok]
    return v @ kt @ v.conj().T


def _sld_inner(rho: np.ndarray, a: np.ndarray, b: np.ndarray) -> complex:
    """Symmetrized inner product <a, b> = Tr a^dag (b rho + rho b)/2."""
    return 0.5 * np.trace(a.conj().T @ (b @ rho + rho @ b))


def d_invariance(model: ModelPoint, ls: list) -> tuple[bool, float]:
    """Whether K maps the SLD span into itself, with the projection residual.

    Each K(L_j) is least-squares projected onto the complex span of the SLDs
    under the symmetrized inner product; the returned residual is the largest
    relative projection error.
    """
    rho = model.rho.matrix
    d = len(ls)
    gram = np.array([[_sld_inner(rho, ls[i], ls[k]) for k in range(d)] for i in range(d)])
    worst = 0.0
    for j in range(d):
        kj = commutation_superoperator(model.rho, ls[j])
        rhs = np.array([_sld_inner(rho, ls[i], kj) for i in range(d)])
        coeff = np.linalg.lstsq(gram, rhs, rcond=None)[0]
        resid_op = kj - sum(c * l for c, l in zip(coeff, ls))
        norm_k = np.sqrt(abs(_sld_inner(rho, kj, kj)))
        norm_r = np.sqrt(abs(_sld_inner(rho, resid_op, resid_op)))
        worst = max(worst, float(norm_r / norm_k) if norm_k > 0 else 0.0)
    return bool(worst < D_INVARIANCE_TOL), worst


def d_matrix(model: ModelPoint, ls: list) -> np.ndarray:
    """Real antisymmetric matrix D_jk = Tr[(-i) K(L_j) D_k].

    The factor -i makes the entries real for Hermitian derivatives; without
    it the trace of an anti-Hermitian times a Hermitian operator is purely
    imaginary.
    """
    d = len(ls)
    out = np.zeros((d, d))
    for j in range(d):
        kj = commutation_superoperator(model.rho, ls[j])
        for k in range(d):
            out[j, k] = (-1j * np.trace(kj @ model.derivs[k])).real
    return out


def sld_bound(fisher: np.ndarray, weight: np.ndarray) -> float:
    """Tr G F^{-1}, the SLD scalar bound."""
    if np.linalg.cond(fisher) > FISHER_CONDITION_LIMIT:
        raise ComputationError("Fisher matrix singular", reason="FISHER_SINGULAR")
    return float(np.trace(weight @ np.linalg.inv(fisher)).real)


def _sqrt_psd(g: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(g)
    if w.min() < -1e-12:
        raise ValueError("weight matrix must be positive semidefinite")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _trace_norm(m: np.ndarray) -> float:
    return float(np.linalg.svd(m, compute_uv=False).sum())


def rld_bound(rld_fisher_matrix: np.ndarray, weight: np.ndarray) -> float:
    """Tr Re(sqrtG Ftil^{-1} sqrtG) + tracenorm Im(sqrtG Ftil^{-1} sqrtG)."""
    if np.linalg.cond(rld_fisher_matrix) > FISHER_CONDITION_LIMIT:
        raise ComputationError("RLD Fisher matrix singular", reason="FISHER_SINGULAR")
    root = _sqrt_psd(weight)
    m = root @ np.linalg.inv(rld_fisher_matrix) @ root
    return float(np.trace(m.real) + _trace_norm(m.imag))


def rld_bound_d_invariant(fisher: np.ndarray, dmat: np.ndarray, weight: np.ndarray) -> float:
    """Closed form Tr G F^{-1} + (1/2) tracenorm(sqrtG F^{-1} D F^{-1} sqrtG)."""
    finv = np.linalg.inv(fisher)
    root = _sqrt_psd(weight)
    return float(np.trace(weight @ finv).real + 0.5 * _trace_norm(root @ finv @ dmat @ finv @ root))


def holevo_upper_bound(model: ModelPoint, fisher: np.ndarray, ls: list, weight: np.ndarray) -> float:
    """Upper value of the Holevo-Nagaoka program at X_k = sum_j (F^{-1})_kj L_j.

    Verifies the unbiasedness constraint Tr X_j D_k = delta_jk, then returns
    Tr G Re Z + tracenorm(sqrtG Im Z sqrtG) with Z_jk = Tr rho X_j X_k.  Lies
    between the SLD bound and twice the SLD bound.
    """
    finv = np.linalg.inv(fisher)
    xs = [sum(finv[k, j] * ls[j] for j in range(len(ls))) for k in range(len(ls))]
    d = len(xs)
    constraint = np.array([[np.trace(xs[j] @ model.derivs[k]) for k in range(d)] for j in range(d)])
    if np.max(np.abs(constraint - np.eye(d))) > CONSTRAINT_TOL:
        raise ComputationError("X* constraint violated", reason="CONSTRAINT_VIOLATED")
    rho = model.rho.matrix
    z = np.array([[np.trace(rho @ xs[j] @ xs[k]) for k in range(d)] for j in range(d)])
    root = _sqrt_psd(weight)
    return float(np.trace(weight @ z.real).real + _trace_norm((root @ z @ root).imag))


def diagonal_model_fisher(w: WeightDistribution) -> float:
    """Closed-form diagonal Fisher entry of the rotation model on weights p_m.

    F_11 = F_22 = sum_m (p_{m+1} - p_m)^2 / (p_{m+1} + p_m) (j-m)(j+m+1),
    with vanishing-denominator terms contributing zero.  Matches the generic
    SLD solve; no extra prefactor (the solved SLDs are K/2 in ladder form,
    which is where a spurious factor of four would otherwise creep in).
    """
    p = w.weights
    j = w.sys.j
    m = np.arange(w.sys.n) - j
    s = p[1:] + p[:-1]
    diff2 = (p[1:] - p[:-1]) ** 2
    mask = s > 0
    out = np.zeros_like(s)
    out[mask] = diff2[mask] / s[mask]
    return float(np.sum(out * (j - m) * (j + m + 1)))


def bounds_report(w: WeightDistribution, weight: Optional[np.ndarray] = None) -> BoundsReport:
    """Assemble every local bound for the rotation model on the given weights."""
    g = np.eye(2) if weight is None else np.asarray(weight, dtype=float)
    model = unitary_model(diagonal_state(w))
    f, ls = sld_fisher(model)
    s_bound = sld_bound(f, g)
    s_upper = len(model.derivs) * s_bound
    hn = holevo_upper_bound(model, f, ls, g)
    invariant, residual = d_invariance(model, ls)
    rld_value = None
    rld_reason = None
    ftil = None
    try:
        ftil = rld_fisher(model)
        rld_value = rld_bound(ftil, g)
    except ComputationError as exc:
        rld_reason = exc.reason
    dmat = d_matrix(model, ls)
    hn_closed = rld_bound_d_invariant(f, dmat, g) if invariant else None
    fm = FisherMatrices(sld=f, rld=ftil, d_matrix=dmat)
    return BoundsReport(
        weight=g,
        fisher=fm,
        sld_bound=s_bound,
        sld_upper=s_upper,
        hn_upper=hn,
        d_invariant=invariant,
        d_residual=residual,
        rld_bound=rld_value,
        rld_reason=rld_reason,
        hn_d_invariant=hn_closed,
    )
