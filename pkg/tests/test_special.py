import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma, loggamma

from nlsff.errors import BarnesRange, RangeViolation
from nlsff.special import (
    aleph,
    barnes_g,
    cauchy_det_real,
    kappa,
    log_barnes_g,
    log_gamma_checked,
    log_pochhammer_ratio,
    varphi_p,
)
from nlsff.thermo import solve_dressed


@pytest.mark.parametrize("z,expected", [(1, 1.0), (2, 1.0), (3, 1.0), (4, 2.0), (5, 12.0), (6, 288.0)])
def test_barnes_classical_values(z, expected):
    assert abs(barnes_g(z) - expected) < 1e-12 * expected


def test_barnes_zeros():
    for z in (0, -1, -5):
        assert barnes_g(z) == 0
        with pytest.raises(BarnesRange):
            log_barnes_g(z)
    with pytest.raises(BarnesRange):
        barnes_g(-12.5)


def test_barnes_real_output_on_real_axis():
    assert isinstance(barnes_g(0.37), complex) and barnes_g(0.37).imag == 0


complex_args = st.builds(complex, st.floats(-4.5, 12.0), st.floats(-3.0, 3.0)).filter(
    lambda z: not (abs(z.imag) < 1e-3 and abs(z.real - round(z.real)) < 1e-3 and z.real < 0.5))


@given(z=complex_args)
def test_barnes_matches_mpmath(z):
    ref = complex(mpmath.barnesg(mpmath.mpc(z.real, z.imag)))
    assert abs(barnes_g(z) - ref) <= 1e-12 * max(abs(ref), 1e-300) + 1e-300


@given(z=complex_args)
def test_barnes_functional_equation(z):
    lhs = np.exp(log_barnes_g(z + 1) - log_barnes_g(z))
    assert abs(lhs - gamma(z)) <= 1e-11 * abs(gamma(z))


def test_log_gamma_checked():
    assert log_gamma_checked(4.5) == pytest.approx(loggamma(4.5), rel=1e-15)
    with pytest.raises(RangeViolation):
        log_gamma_checked(-2)


def test_pochhammer_ratio():
    p, nu, k = 40, 0.37 - 0.1j, 9
    direct = loggamma(p) + loggamma(p - k + nu) - loggamma(p - k) - loggamma(p + nu)
    assert np.exp(log_pochhammer_ratio(p, nu, k)) == pytest.approx(np.exp(direct), rel=1e-12)
    # nonpositive integer p: finite even though Gamma(p) has a pole
    val = np.exp(log_pochhammer_ratio(-2, 0.3, 4))
    expected = np.prod([(-2 - j) / (-2 + 0.3 - j) for j in range(1, 5)])
    assert val == pytest.approx(expected, rel=1e-14)


def test_cauchy_det_real(rng):
    x, y = rng.normal(size=3), rng.normal(size=3) + 5
    assert cauchy_det_real(x, y) == pytest.approx(np.linalg.det(1 / (x[:, None] - y[None, :])), rel=1e-12)
    assert cauchy_det_real([], []) == 1.0


def test_kappa_of_constant(model):
    assert kappa(lambda z: 0.3 + 0 * np.asarray(z), 0.5, model.nodes, model.weights) == pytest.approx(1.0, abs=1e-15)


def test_varphi():
    free = solve_dressed(1e6, 1.0)
    assert varphi_p(free, 0.3, -0.5) == pytest.approx(2 * np.pi, rel=1e-5)


def test_varphi_diagonal(model):
    lam = 0.4
    assert varphi_p(model, lam, lam) == pytest.approx(2 * np.pi / model.p_prime_at(lam), rel=1e-14)
    near = varphi_p(model, lam, lam + 1e-6)
    assert near == pytest.approx(varphi_p(model, lam, lam), rel=1e-6)


def test_aleph_of_constant(model):
    nu = lambda z: 0.25 + 0 * np.asarray(z, dtype=complex)
    w = 1.5
    expected = 0.5 * np.log(varphi_p(model, w, model.q) / varphi_p(model, w, -model.q))
    assert aleph(nu, w, model) == pytest.approx(expected, rel=1e-14)
