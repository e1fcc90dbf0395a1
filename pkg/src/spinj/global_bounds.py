"""Optimal covariant measurement bounds for the rotation model.

The maximal worst-case average fidelity over all measurements is available
in closed form whenever the per-dimension overlap of |up><up| x rho with the
upper coupled sector dominates the lower one:

    (1/(2j+2)) Tr P_+ (|up><up| x rho)  >=  (1/(2j)) Tr P_- (|up><up| x rho)

Under that condition the maximum of the worst-case fidelity R is
(2j+1)/(2j+2) Tr P_+ (|up><up| x rho), attained by the covariant measurement
seeded with the highest-weight projector, and the global error is
eta = 4(1 - R).  Outside the condition no closed-form optimum is emitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .spin import SpinSystem, coupling_projectors
from .states import DensityState, WeightDistribution, diagonal_state

CONDITION_TIE_TOL = 1e-12


class ConditionNotMet(RuntimeError):
    """The sector condition fails; the closed-form optimum does not apply."""

    reason = "SECTOR_CONDITION_FAILS"


@dataclass(frozen=True)
class GlobalReport:
    n: int
    condition_lhs: float
    condition_rhs: float
    condition_holds: bool
    r_max: Optional[float] = None
    eta: Optional[float] = None
    closed_form_r: Optional[float] = None
    asymptotic_eta: Optional[float] = None


def _up_tensor(state: DensityState) -> np.ndarray:
    up = np.zeros((2, 2), dtype=complex)
    up[1, 1] = 1.0
    return np.kron(up, state.matrix)


def _require_diagonal(state: DensityState):
    if not state.is_diagonal():
        raise ValueError("sector overlaps are defined for the diagonal family seed")


@lru_cache(maxsize=64)
def _cached_projectors(n: int):
    # shared across sweep rows; callers must treat the arrays as read-only
    return coupling_projectors(SpinSystem(n))


def sector_overlaps(state: DensityState) -> tuple[float, float]:
    """Per-dimension overlaps of |up><up| x rho with the two coupled sectors.

    Returns (upper, lower) where upper uses the spin j+1/2 block divided by
    2j+2 and lower the spin j-1/2 block divided by 2j.  They satisfy
    (2j+2) upper + 2j lower = 1 for any density state.
    """
    _require_diagonal(state)
    n = state.sys.n
    if n < 1:
        raise ValueError("need at least one boson to split into two sectors")
    proj = _cached_projectors(n)
    m = _up_tensor(state)
    upper = float(np.sum(proj.p_plus * m.T).real) / (n + 2)
    lower = float(np.sum(proj.p_minus * m.T).real) / n
    return upper, lower


def sector_condition_holds(state: DensityState) -> bool:
    """Upper-sector dominance, with ties counting as holding."""
    upper, lower = sector_overlaps(state)
    return upper >= lower - CONDITION_TIE_TOL


def max_average_fidelity(state: DensityState) -> float:
    """Optimal worst-case average fidelity R, via the coupling projectors."""
    upper, lower = sector_overlaps(state)
    if upper < lower - CONDITION_TIE_TOL:
        raise ConditionNotMet(
            "sector condition fails: the closed-form covariant optimum does not apply"
        )
    return (state.sys.n + 1) * upper


def global_error(state: DensityState) -> float:
    """eta = 4(1 - R) at the covariant optimum."""
    return 4.0 * (1.0 - max_average_fidelity(state))


def binomial_r_max(n: int, p: float) -> float:
    """Closed form (np + 1)/(n + 2) for the binomial family.

    The projector trace is the mean of (k+1)/(n+1) under Binomial(n, p),
    which is (np+1)/(n+1); multiplying by (n+1)/(n+2) keeps the +1.  The
    limit is still p, so the error converges to 4(1-p).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    return (n * p + 1) / (n + 2)


def geometric_mean_index(n: int, r: float) -> float:
    """Mean of k under the normalized geometric weights r^k, k = 0..n.

    Overflow-safe for r > 1 through the decaying power r^{-(n+1)}.
    """
    if r <= 0 or r == 1.0:
        raise ValueError(f"r must be positive and different from 1, got {r}")
    if r > 1:
        eps = r ** (-(n + 1.0))
        return (n + eps) / (1.0 - eps) - 1.0 / (r - 1.0)
    rn = r ** (n + 1.0)
    return (n * rn + 1.0) / (rn - 1.0) - 1.0 / (r - 1.0)


def geometric_r_max(n: int, r: float) -> float:
    """Closed form (1 + mean_k)/(n + 2) for the geometric family, r > 1."""
    if r <= 1.0:
        raise ValueError(f"closed-form optimum requires r > 1, got {r}")
    if n < 1:
        raise ValueError("n must be at least 1")
    return (1.0 + geometric_mean_index(n, r)) / (n + 2)


def geometric_error_expansion(n: int, r: float) -> float:
    """Two-term large-n expansion of the geometric global error.

    Expanding the exact 4r/((n+2)(r-1)) in powers of 1/n gives

        4r/(n(r-1)) - 8r/(n^2(r-1)) + O(n^-3) + O(r^-(n+1)).

    The second-order coefficient carries the same factor r as the first (it
    comes from the same r/(r-1) prefactor); the leading term alone is the
    asymptotic RLD bound 4r/(n(r-1)).
    """
    if r <= 1.0:
        raise ValueError(f"expansion requires r > 1, got {r}")
    if n < 1:
        raise ValueError("n must be at least 1")
    lead = 4.0 * r / (n * (r - 1.0))
    return lead - 8.0 * r / (n * n * (r - 1.0))


def delta_r_max(n: int, a: float) -> float:
    """Closed form (n/2 + a + 1)/(n + 2) for the point-mass family, a >= 0.

    Exactly 1/2 + (a + ... )-corrections; for a = 0 the error 4(1 - R) is 2
    at every n, so the family has constant global error despite its
    quadratically growing Fisher information.
    """
    if a < 0:
        raise ValueError("the closed-form optimum requires a >= 0")
    if n < 1:
        raise ValueError("n must be at least 1")
    return (n / 2 + a + 1) / (n + 2)


def family_r_max(w: WeightDistribution) -> Optional[float]:
    """Family closed form for the optimal R, when one is known and applies."""
    n = w.sys.n
    if w.family == "binomial":
        return binomial_r_max(n, w.params["p"])
    if w.family == "geometric":
        r = w.params["r"]
        return geometric_r_max(n, r) if r > 1 else None
    if w.family == "delta":
        a = w.params["a"]
        return delta_r_max(n, a) if a >= 0 else None
    return None


def family_asymptotic_eta(w: WeightDistribution) -> Optional[float]:
    """Reference large-n error value for the family, if one is known."""
    n = w.sys.n
    if w.family == "binomial":
        return 4.0 * (1.0 - w.params["p"])
    if w.family == "geometric":
        r = w.params["r"]
        return geometric_error_expansion(n, r) if r > 1 else None
    if w.family == "delta":
        return 2.0 - 4.0 * w.params["a"] / n
    return None


def global_report(w: WeightDistribution) -> GlobalReport:
    """Sector overlaps, condition, and (when available) the optimal error."""
    state = diagonal_state(w)
    upper, lower = sector_overlaps(state)
    holds = upper >= lower - CONDITION_TIE_TOL
    r_max = eta = None
    if holds:
        r_max = (w.sys.n + 1) * upper
        eta = 4.0 * (1.0 - r_max)
    return GlobalReport(
        n=w.sys.n,
        condition_lhs=upper,
        condition_rhs=lower,
        condition_holds=holds,
        r_max=r_max,
        eta=eta,
        closed_form_r=family_r_max(w) if holds else None,
        asymptotic_eta=family_asymptotic_eta(w) if holds else None,
    )
