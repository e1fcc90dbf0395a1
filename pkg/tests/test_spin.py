import math

import numpy as np
import pytest

from spinj import (
    SpinSystem,
    angular_momentum,
    casimir,
    coherent_top_amplitudes,
    coupling_projectors,
    exp_i_hermitian,
    ladder_plus,
)
from spinj.states import ParamPoint


def test_spin_system_fields():
    sys = SpinSystem(5)
    assert sys.j == 2.5
    assert sys.dim == 6
    assert list(sys.m_values()) == [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]
    with pytest.raises(ValueError):
        SpinSystem(-1)


def test_ladder_plus_small_systems():
    assert ladder_plus(SpinSystem(1))[1, 0] == pytest.approx(1.0)
    jp2 = ladder_plus(SpinSystem(2))
    assert jp2[1, 0] == pytest.approx(math.sqrt(2))
    assert jp2[2, 1] == pytest.approx(math.sqrt(2))
    # n=4: coupling m=-2 -> -1 evaluates sqrt((j-m)(j+m+1)) = sqrt(4*1)
    assert ladder_plus(SpinSystem(4))[1, 0] == pytest.approx(2.0)


def test_angular_momentum_matrices():
    sys = SpinSystem(1)
    assert np.allclose(angular_momentum(sys, 3), np.diag([-0.5, 0.5]))
    assert np.allclose(angular_momentum(sys, 1), np.array([[0, 0.5], [0.5, 0]]))
    j2 = angular_momentum(SpinSystem(2), 2)
    assert np.allclose(j2, -j2.T)  # antisymmetric, purely imaginary entries
    assert np.allclose(np.abs(j2[np.abs(j2) > 0]), math.sqrt(2) / 2)
    with pytest.raises(ValueError):
        angular_momentum(sys, 4)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 14, 30])
def test_commutation_relations(n):
    sys = SpinSystem(n)
    js = [angular_momentum(sys, ax) for ax in (1, 2, 3)]
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        assert np.max(np.abs(js[a] @ js[b] - js[b] @ js[a] - 1j * js[c])) < 1e-10


@pytest.mark.parametrize("n,value", [(1, 0.75), (2, 2.0), (10, 30.0)])
def test_casimir_scalar(n, value):
    sys = SpinSystem(n)
    assert np.max(np.abs(casimir(sys) - value * np.eye(sys.dim))) < 1e-10


def test_exp_identity_and_unitarity(rng):
    assert np.allclose(exp_i_hermitian(np.zeros((4, 4))), np.eye(4))
    for n in (2, 5, 11):
        dim = n + 1
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (a + a.conj().T) / 2
        u = exp_i_hermitian(h)
        assert np.max(np.abs(u @ u.conj().T - np.eye(dim))) < 1e-10
        assert abs(abs(np.linalg.det(u)) - 1.0) < 1e-10


def test_exp_two_by_two_closed_form(rng):
    sys = SpinSystem(1)
    for _ in range(25):
        t1, t2 = rng.uniform(-1.5, 1.5, 2)
        theta = ParamPoint(t1, t2)
        h = t1 * angular_momentum(sys, 1) + t2 * angular_momentum(sys, 2)
        r, phi = theta.radius, theta.azimuth
        expected = np.array(
            [
                [math.cos(r / 2), 1j * np.exp(-1j * phi) * math.sin(r / 2)],
                [1j * np.exp(1j * phi) * math.sin(r / 2), math.cos(r / 2)],
            ]
        )
        assert np.max(np.abs(exp_i_hermitian(h) - expected)) < 1e-12


def test_exp_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not Hermitian"):
        exp_i_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_projectors_spin_half_pair():
    pr = coupling_projectors(SpinSystem(1))
    assert np.trace(pr.p_plus).real == pytest.approx(3.0, abs=1e-10)  # triplet
    assert np.trace(pr.p_minus).real == pytest.approx(1.0, abs=1e-10)  # singlet


@pytest.mark.parametrize("n", [1, 2, 3, 8, 15, 30])
def test_projector_algebra(n):
    sys = SpinSystem(n)
    pr = coupling_projectors(sys)
    eye = np.eye(2 * sys.dim)
    assert np.max(np.abs(pr.p_plus @ pr.p_plus - pr.p_plus)) < 1e-10
    assert np.max(np.abs(pr.p_minus @ pr.p_minus - pr.p_minus)) < 1e-10
    assert np.max(np.abs(pr.p_plus @ pr.p_minus)) < 1e-10
    assert np.max(np.abs(pr.p_plus + pr.p_minus - eye)) < 1e-10
    assert np.trace(pr.p_plus).real == pytest.approx(n + 2, abs=1e-10)
    assert np.trace(pr.p_minus).real == pytest.approx(n, abs=1e-10)


def test_projector_stretched_state():
    # |up>|1;1> has maximal total spin, so it lies entirely in the upper block
    pr = coupling_projectors(SpinSystem(2))
    v = np.zeros(6, dtype=complex)
    v[3 + 2] = 1.0  # spin-1/2 index 1 (up), spin-1 index 2 (m=1)
    assert np.max(np.abs(pr.p_plus @ v - v)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 4, 7, 10])
def test_projectors_commute_with_joint_rotations(n, rng):
    sys = SpinSystem(n)
    half = SpinSystem(1)
    pr = coupling_projectors(sys)
    for _ in range(20):
        t = rng.uniform(-2, 2, 3)
        uj = exp_i_hermitian(sum(t[i] * angular_momentum(sys, i + 1) for i in range(3)))
        uh = exp_i_hermitian(sum(t[i] * angular_momentum(half, i + 1) for i in range(3)))
        u = np.kron(uh, uj)
        for p in (pr.p_plus, pr.p_minus):
            assert np.max(np.abs(u @ p - p @ u)) < 1e-9


def test_projectors_degenerate_mode():
    with pytest.raises(ValueError, match="no lower coupled space"):
        coupling_projectors(SpinSystem(0))
    pr = coupling_projectors(SpinSystem(0), allow_degenerate=True)
    assert np.allclose(pr.p_plus, np.eye(2))
    assert np.max(np.abs(pr.p_minus)) == 0.0


@pytest.mark.parametrize("n", [1, 4, 9])
def test_coherent_amplitudes_match_exponential(n, rng):
    sys = SpinSystem(n)
    top = np.zeros(sys.dim, dtype=complex)
    top[-1] = 1.0
    checked = 0
    while checked < 100:
        t1, t2 = rng.uniform(-2.0, 2.0, 2)
        if math.hypot(t1, t2) > math.pi:
            continue
        theta = ParamPoint(t1, t2)
        h = t1 * angular_momentum(sys, 1) + t2 * angular_momentum(sys, 2)
        direct = exp_i_hermitian(h) @ top
        closed = coherent_top_amplitudes(sys, [theta.radius], [theta.azimuth])[0]
        assert np.max(np.abs(direct - closed)) < 1e-10
        checked += 1
