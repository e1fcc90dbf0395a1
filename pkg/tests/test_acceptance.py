"""End-to-end acceptance gates for the package, one test per criterion.

Three additional tests are marked ``known_discrepancy`` and are expected to
FAIL: they pin externally quoted target values that contradict exact
identities proved and verified elsewhere in this suite (each failure message
derives the correct value from first principles, and a passing companion
test asserts the consistent value).  Run ``pytest -m "not
known_discrepancy"`` for the self-consistent green gate.
"""

import math
import time

import numpy as np
import pytest

from spinj import (
    ParamPoint,
    SimConfig,
    SpinSystem,
    average_fidelity,
    binomial_estimator_moments,
    binomial_mse,
    binomial_r_max,
    binomial_weights,
    custom_weights,
    d_invariance,
    d_matrix,
    delta_weights,
    diagonal_model_fisher,
    diagonal_state,
    geometric_error_expansion,
    geometric_moments,
    geometric_r_max,
    geometric_weights,
    max_average_fidelity,
    natural_fisher,
    rld_fisher,
    sld_bound,
    sld_fisher,
    unitary_model,
)
from spinj import cli

BINOMIAL_P_GRID = (0.6, 0.75, 0.9)


def fisher_via_generic_solver(weights):
    f, _ = sld_fisher(unitary_model(diagonal_state(weights)))
    return f


# --------------------------------------------------------------- criterion 1

def test_binomial_projector_optimum_matches_consistent_closed_form():
    """Projector-path optimum equals (np+1)/(n+2) to 1e-9 over the full grid."""
    start = time.perf_counter()
    worst = 0.0
    for n in range(2, 101):
        sys = SpinSystem(n)
        for p in BINOMIAL_P_GRID:
            got = max_average_fidelity(diagonal_state(binomial_weights(sys, p)))
            worst = max(worst, abs(got - binomial_r_max(n, p)))
            assert abs(got - (n * p + 1) / (n + 2)) <= 1e-9
    elapsed = time.perf_counter() - start
    assert worst <= 1e-9
    assert elapsed < 30.0, f"runtime {elapsed:.1f}s exceeds 30s"


@pytest.mark.known_discrepancy
def test_binomial_projector_optimum_quoted_np_over_n_plus_2():
    """Quoted target np/(n+2) for the same quantity; off by 1/(n+2).

    The projector trace of |up><up| x rho over the upper coupled block is
    the mean of (k+1)/(n+1) under Binomial(n, p), which is (np+1)/(n+1),
    so the optimum is (np+1)/(n+2).  The quoted np/(n+2) drops the +1 that
    its own defining trace carries; both converge to p, but they differ by
    1/(n+2) at every finite n, far beyond the 1e-9 tolerance.
    """
    n, p = 2, 0.75
    got = max_average_fidelity(diagonal_state(binomial_weights(SpinSystem(n), p)))
    assert abs(got - n * p / (n + 2)) <= 1e-9, (
        f"projector path gives {got:.12f} = (np+1)/(n+2) = {(n * p + 1) / (n + 2):.12f}; "
        f"the quoted np/(n+2) = {n * p / (n + 2):.12f} is smaller by exactly "
        f"1/(n+2) = {1 / (n + 2):.12f}"
    )


# --------------------------------------------------------------- criterion 2

def test_geometric_error_two_term_expansion_and_rld_leading_term():
    """Exact error vs consistent two-term expansion at n=200, r=2, and the
    leading-term identity with the asymptotic RLD value 4r/(n(r-1))."""
    start = time.perf_counter()
    n, r = 200, 2.0
    exact = 4.0 * (1.0 - geometric_r_max(n, r))
    two_term = geometric_error_expansion(n, r)
    assert abs(exact - two_term) < 1e-4
    lead = 4.0 * r / (n * (r - 1.0))
    assert lead == 0.04
    assert two_term == lead - 8.0 * r / (n * n * (r - 1.0))
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0


@pytest.mark.known_discrepancy
def test_geometric_error_quoted_second_order_term():
    """Quoted two-term form 4r/(n(r-1)) - 8/(n^2(r-1)) misses a factor r.

    The exact error is 4r/((n+2)(r-1)) up to exponentially small terms;
    expanding in 1/n gives 4r/(n(r-1)) - 8r/(n^2(r-1)) + O(n^-3).  Both
    orders carry the same r/(r-1) prefactor.  Without the r the second-order
    term is wrong whenever r != 1, and at n=200, r=2 the quoted form misses
    the exact value by about 2e-4, twice the 1e-4 tolerance.
    """
    n, r = 200, 2.0
    exact = 4.0 * (1.0 - geometric_r_max(n, r))
    quoted = 4.0 * r / (n * (r - 1.0)) - 8.0 / (n * n * (r - 1.0))
    assert abs(exact - quoted) < 1e-4, (
        f"exact error {exact:.10f}; quoted two-term form {quoted:.10f}; "
        f"gap {abs(exact - quoted):.3e} (the r-corrected second order gives "
        f"{geometric_error_expansion(n, r):.10f}, gap "
        f"{abs(exact - geometric_error_expansion(n, r)):.3e})"
    )


# --------------------------------------------------------------- criterion 3

def test_half_dicke_separation():
    """Constant global error (eta = 2 >= 1.9) with bounded n^2 * sld_bound."""
    start = time.perf_counter()
    for n in (100, 150, 200):
        w = delta_weights(SpinSystem(n), 0.0)
        eta = 4.0 * (1.0 - max_average_fidelity(diagonal_state(w)))
        assert eta >= 1.9
        f = fisher_via_generic_solver(w)
        j = n / 2
        # the generic solver reproduces 2j(j+1) = n(n+2)/2 exactly
        assert f[0, 0] == pytest.approx(2 * j * (j + 1), rel=1e-10)
        scaled = n * n * sld_bound(f, np.eye(2))
        assert 3.5 <= scaled <= 4.0
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"


@pytest.mark.known_discrepancy
def test_half_dicke_quoted_fisher_prefactor():
    """Quoted half-Dicke Fisher 8j(j+1) = 2n(n+2) is four times the solver's.

    The solved logarithmic derivative carries ladder coefficients
    (p_[m+1]-p_m)/(p_[m+1]+p_m), half of the raw 2(..)/(..) ladder weights,
    so the information is sum (dp)^2/(p+p) (j-m)(j+m+1), not four times it.
    For the balanced point mass this is 2j(j+1) = n(n+2)/2, matching the
    rank-one identity F = 4<J1^2> and the two-dimensional special case
    F = (2p-1)^2 <= 1.  The quoted 8j(j+1) would give F = 4 for a single
    boson, impossible for any state of a two-level system.
    """
    n = 100
    w = delta_weights(SpinSystem(n), 0.0)
    f = fisher_via_generic_solver(w)
    quoted = 2 * n * (n + 2)
    assert f[0, 0] == pytest.approx(quoted, rel=1e-9), (
        f"generic solver gives {f[0, 0]:.6f} = n(n+2)/2 = {n * (n + 2) / 2:.6f}; "
        f"the quoted value {quoted} is exactly four times larger"
    )


# --------------------------------------------------------------- criterion 4

def test_binomial_fisher_large_n_scaling():
    """Generic solver at n=400, p=0.75 sits within 5% of n/2."""
    start = time.perf_counter()
    n, p = 400, 0.75
    f = fisher_via_generic_solver(binomial_weights(SpinSystem(n), p))
    assert abs(f[0, 0] - n / 2) / (n / 2) < 0.05
    assert abs(f[0, 1]) < 1e-8
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"


@pytest.mark.known_discrepancy
def test_binomial_fisher_quoted_2n_scaling():
    """Quoted large-n value 2n carries the same spurious factor of four.

    The dephased binomial family has information n/2 + O(1) under this
    rotation model: the solved ladder coefficients are (dp)/(p+p) of the raw
    ladder weights, giving sum (dp)^2/(p+p)(j-m)(j+m+1) ~ n/2.  At n=1 the
    exact value is (2p-1)^2 < 1, already incompatible with 2n = 2.
    """
    n, p = 400, 0.75
    f = fisher_via_generic_solver(binomial_weights(SpinSystem(n), p))
    assert abs(f[0, 0] - 2 * n) / (2 * n) < 0.05, (
        f"generic solver gives {f[0, 0]:.4f}, about n/2 = {n / 2}; "
        f"the quoted 2n = {2 * n} is four times larger"
    )


# --------------------------------------------------------------- criterion 5

def test_closed_form_fisher_equals_generic_solver_on_random_weights():
    """200 random weight vectors, n <= 50, relative agreement 1e-9."""
    start = time.perf_counter()
    gen = np.random.default_rng(987654321)
    for _ in range(200):
        n = int(gen.integers(1, 51))
        raw = gen.random(n + 1)
        raw[gen.random(n + 1) < 0.2] = 0.0  # exercise the support convention
        if raw.sum() == 0.0:
            raw[int(gen.integers(0, n + 1))] = 1.0
        w = custom_weights(SpinSystem(n), raw / raw.sum())
        f = fisher_via_generic_solver(w)
        closed = diagonal_model_fisher(w)
        assert f[0, 0] == pytest.approx(closed, rel=1e-9, abs=1e-12)
        assert f[1, 1] == pytest.approx(closed, rel=1e-9, abs=1e-12)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0, f"runtime {elapsed:.1f}s exceeds 120s"


# --------------------------------------------------------------- criterion 6

@pytest.mark.parametrize("n", [10, 50])
@pytest.mark.parametrize("r", [1.5, 2.0, 4.0])
def test_geometric_d_invariance_and_rld_inverse_identity(n, r):
    model = unitary_model(diagonal_state(geometric_weights(SpinSystem(n), r)))
    f, ls = sld_fisher(model)
    ok, residual = d_invariance(model, ls)
    assert ok and residual < 1e-8
    dm = d_matrix(model, ls)
    finv = np.linalg.inv(f)
    lhs = np.linalg.inv(rld_fisher(model))
    rhs = finv + 0.5j * finv @ dm @ finv
    assert np.max(np.abs(lhs - rhs)) <= 1e-8


# --------------------------------------------------------------- criterion 7

def test_classical_attainability_exact_sums():
    for n in range(1, 201):
        for theta in (-2.0, -1.0, -0.1, 0.1, 1.0, 2.0):
            _, var = geometric_moments(n, theta)
            assert abs(var - natural_fisher(n, theta)) < 1e-10
        for p in BINOMIAL_P_GRID:
            mean, mse = binomial_estimator_moments(n, p)
            assert abs(mean - p) < 1e-12
            assert abs(mse - binomial_mse(n, p)) < 1e-12


# --------------------------------------------------------------- criterion 8

def test_monte_carlo_matches_analytic_optimum():
    start = time.perf_counter()
    samples = 100_000
    cases = []
    w1 = delta_weights(SpinSystem(1), 0.5)
    cases.append((w1, 2.0 / 3.0, 41))
    w2 = geometric_weights(SpinSystem(10), 2.0)
    cases.append((w2, geometric_r_max(10, 2.0), 42))
    w3 = binomial_weights(SpinSystem(6), 0.8)
    cases.append((w3, max_average_fidelity(diagonal_state(w3)), 43))
    for w, analytic, seed in cases:
        cfg = SimConfig(w, ParamPoint(0.0, 0.0), samples, seed)
        res = average_fidelity(cfg)
        assert abs(res.mean_fidelity - analytic) < 3 * res.std_error, (
            w.family,
            res.mean_fidelity,
            analytic,
            res.std_error,
        )
    # determinism under a fixed seed
    cfg = SimConfig(w2, ParamPoint(0.0, 0.0), 20_000, 7)
    assert average_fidelity(cfg) == average_fidelity(cfg)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0, f"runtime {elapsed:.1f}s exceeds 120s"


# --------------------------------------------------------------- criterion 9

def test_structural_invariant_suite_and_verify_command(capsys):
    code = cli.main(["verify", "--max-n", "30"])
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.startswith("[")]
    assert len(lines) >= 40
    assert all(l.startswith("[PASS]") for l in lines), "\n".join(
        l for l in lines if not l.startswith("[PASS]")
    )
    assert code == 0
