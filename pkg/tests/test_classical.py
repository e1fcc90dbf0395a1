import math

import numpy as np
import pytest

from spinj import (
    SpinSystem,
    binomial_estimator_moments,
    binomial_mse,
    diagonal_state,
    expectation_parameter,
    geometric_moments,
    geometric_pmf,
    geometric_weights,
    natural_fisher,
)


def test_pmf_normalized_and_monotone():
    for n, theta in ((5, 0.7), (200, 2.0), (200, -2.0)):
        p = geometric_pmf(n, theta)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(p >= 0)
        ratios = p[1:] / p[:-1]
        assert np.allclose(ratios, math.exp(theta), rtol=1e-10)


def test_binomial_mse_values():
    assert binomial_mse(4, 0.5) == pytest.approx(0.0625)
    assert binomial_mse(10, 0.001) < 1e-4  # vanishes toward the edges
    with pytest.raises(ValueError):
        binomial_mse(3, 1.0)


@pytest.mark.parametrize("n", [1, 7, 40, 200])
@pytest.mark.parametrize("p", [0.2, 0.5, 0.75])
def test_binomial_estimator_exact_sums(n, p):
    mean, mse = binomial_estimator_moments(n, p)
    assert abs(mean - p) < 1e-12
    assert abs(mse - binomial_mse(n, p)) < 1e-12


def test_expectation_parameter_values():
    assert expectation_parameter(6, 0.0) == 3.0
    # n = 2, r = 3: mean of k under (1, 3, 9)/13
    assert expectation_parameter(2, math.log(3.0)) == pytest.approx(21 / 13, rel=1e-12)
    assert expectation_parameter(9, 80.0) == pytest.approx(9.0, abs=1e-12)
    assert expectation_parameter(9, -80.0) == pytest.approx(0.0, abs=1e-12)


def test_expectation_parameter_matches_exact_sum():
    for n in (2, 30, 200):
        for theta in (-2.0, -0.3, 0.4, 1.0):
            mean, _ = geometric_moments(n, theta)
            assert abs(mean - expectation_parameter(n, theta)) < 1e-10


def test_natural_fisher_uniform_limit():
    for n in (1, 6, 33):
        assert natural_fisher(n, 0.0) == pytest.approx(n * (n + 2) / 12, rel=1e-12)


def test_natural_fisher_small_case():
    # n = 2, r = 3: (0 + 3 + 36)/13 - (21/13)^2 = 66/169
    assert natural_fisher(2, math.log(3.0)) == pytest.approx(66 / 169, rel=1e-12)


@pytest.mark.parametrize("theta", [-2.0, -1.0, -0.1, 0.1, 1.0, 2.0])
def test_variance_equals_natural_fisher(theta):
    for n in (1, 3, 10, 50, 120, 200):
        _, var = geometric_moments(n, theta)
        assert abs(var - natural_fisher(n, theta)) < 1e-10


def test_natural_fisher_near_zero_continuity():
    for n in (5, 80):
        for theta in (1e-9, -1e-8, 1e-5 / (n + 1)):
            _, var = geometric_moments(n, theta)
            assert natural_fisher(n, theta) == pytest.approx(var, rel=1e-9)


def test_quantum_state_measures_to_classical_law():
    for n, r in ((12, 2.0), (80, 0.5), (200, 3.0)):
        w = geometric_weights(SpinSystem(n), r)
        diag = np.diag(diagonal_state(w).matrix).real
        assert np.max(np.abs(diag - geometric_pmf(n, math.log(r)))) < 1e-12
