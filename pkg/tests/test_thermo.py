import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlsff.bethe_core import ModelGeometry, QuantumNumbers, counting_functions, shift_function_finite, solve_bae
from nlsff.errors import BracketingFailure, InputError, OutOfRange, StripViolation
from nlsff.thermo import (
    DressedPhase,
    ExcitationThermo,
    ThermoModel,
    dressed_phase_at,
    find_q,
    rapidity_from_integer,
    shift_thermo,
    solve_dressed,
)


def test_dressed_charge_properties(model):
    Z = model.Z
    np.testing.assert_allclose(Z, Z[::-1], atol=1e-14)
    assert np.all((Z > 1) & (Z < 2))
    x = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(model.p(x).real, -model.p(-x).real, atol=1e-14)


def test_z_equals_p_prime(model):
    assert np.max(np.abs(model.Z - model.p_prime)) < 1e-10
    other = solve_dressed(0.5, 2.0, 128)
    assert np.max(np.abs(other.Z - other.p_prime)) < 1e-10


def test_nystrom_node_doubling():
    a, b = solve_dressed(2.0, 1.1, 32), solve_dressed(2.0, 1.1, 64)
    assert abs(a.dressed_charge(0.0) - b.dressed_charge(0.0)) < 1e-12
    assert abs(a.p(0.7) - b.p(0.7)) < 1e-12
    assert abs(a.fredholm_det() - b.fredholm_det()) < 1e-12


def test_free_limit():
    m = solve_dressed(1e6, 1.0)
    x = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(m.p(x).real, x, atol=1e-5)
    np.testing.assert_allclose(m.Z, 1.0, atol=1e-5)
    assert m.fredholm_det() == pytest.approx(1.0, abs=1e-5)
    assert np.max(np.abs(dressed_phase_at(m, x, 0.3))) < 1e-5


def test_interval_determinant_in_unit_interval(model):
    assert 0 < model.fredholm_det() < 1
    direct = np.linalg.det(np.eye(model.m) - 2 * 2.0 / ((model.nodes[:, None] - model.nodes[None, :]) ** 2 + 4.0)
                           * model.weights[None, :] / (2 * np.pi))
    assert model.fredholm_det() == pytest.approx(direct, rel=1e-12)


def test_find_q():
    assert find_q(1e6, 1.0) == pytest.approx(np.pi, rel=1e-4)
    q = find_q(2.0, 0.5)
    assert abs(solve_dressed(2.0, q).p(q).real - np.pi / 2) < 1e-10
    assert find_q(2.0, 1.0) > q
    with pytest.raises(InputError):
        find_q(2.0, -1.0)


def test_find_q_bracketing_failure(monkeypatch):
    import nlsff.thermo as thermo
    monkeypatch.setattr(thermo.ThermoModel, "p", lambda self, lam: np.asarray(-1.0 + 0j))
    with pytest.raises(BracketingFailure):
        thermo.find_q(2.0, 0.5)


def test_dressed_phase(model):
    mu0 = 0.4
    phi = DressedPhase(model, mu0)
    np.testing.assert_allclose(phi(model.nodes), phi.values, atol=1e-12)
    x = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(dressed_phase_at(model, -x, -mu0), -phi(x), atol=1e-13)
    with pytest.raises(StripViolation):
        phi(0.3 + 2.5j)
    assert np.isfinite(phi(0.3 + 0.9j))


def test_shift_function_ground(model):
    F = shift_thermo(model, ExcitationThermo())
    x = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(F(x), -model.dressed_charge(x) / 2 - dressed_phase_at(model, x, model.q), atol=1e-15)
    free = solve_dressed(1e6, 1.0)
    np.testing.assert_allclose(shift_thermo(free, ExcitationThermo())(x).real, -0.5, atol=1e-5)


def test_shift_function_continuity(model):
    q = model.q
    exc = ExcitationThermo((q + 1e-6,), (q - 1e-6,))
    x = np.linspace(-1, 1, 5)
    ground = shift_thermo(model, ExcitationThermo())(x)
    np.testing.assert_allclose(shift_thermo(model, exc)(x), ground, atol=1e-5)


def test_excitation_validation(model):
    with pytest.raises(InputError):
        shift_thermo(model, ExcitationThermo((0.1,), (0.2,)))
    with pytest.raises(InputError):
        ExcitationThermo((2.0,), ())


def test_rapidity_from_integer(model):
    D, L = 0.5, 64.0
    assert rapidity_from_integer(model, int(D * L), L) == pytest.approx(model.q, abs=1e-10)
    for k in (-5, 3, 17, 40):
        mu = rapidity_from_integer(model, k, L)
        assert abs(model.counting(mu).real - k / L) < 1e-10
    free = solve_dressed(1e6, np.pi)
    # k / L = D / 2 with the model's own density
    assert rapidity_from_integer(free, 32, 64.0 / free.density) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(OutOfRange):
        rapidity_from_integer(model, 10 ** 9, 1.0)


def test_finite_size_counting_function_converges(model):
    D = 0.5
    devs = []
    for N in (64, 128):
        L = N / D
        s = solve_bae(QuantumNumbers.ground(N), ModelGeometry.continuum(2.0, L))
        xi, _ = counting_functions(s)
        devs.append(np.max(np.abs(xi(s.roots) - model.counting(s.roots).real)))
    assert 1.6 < devs[0] / devs[1] < 2.4


def test_finite_size_shift_function_converges(model):
    D = 0.5
    x = np.linspace(-model.q, model.q, 41)
    F = shift_thermo(model, ExcitationThermo())(x).real
    devs = []
    for N in (64, 128):
        g = ModelGeometry.continuum(2.0, N / D)
        Fh = shift_function_finite(solve_bae(QuantumNumbers.ground(N + 1), g), solve_bae(QuantumNumbers.ground(N), g))
        devs.append(np.max(np.abs(Fh(x) - F)))
    assert 1.6 < devs[0] / devs[1] < 2.4


def test_json_round_trip_is_exact(model):
    back = ThermoModel.from_json(model.to_json())
    for name in ("nodes", "weights", "Z", "p_prime"):
        assert np.array_equal(getattr(back, name), getattr(model, name))
    assert back.q == model.q and back.c == model.c
    assert back.to_json() == model.to_json()


def test_json_version_checked(model):
    text = model.to_json().replace('"version": 1', '"version": 99')
    with pytest.raises(ValueError):
        ThermoModel.from_json(text)


@given(c=st.floats(0.5, 20.0), q=st.floats(0.2, 3.0))
def test_z_p_prime_property(c, q):
    m = solve_dressed(c, q, 96)
    assert np.max(np.abs(m.Z - m.p_prime)) < 1e-10 * np.max(m.Z)
