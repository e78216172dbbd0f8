import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlsff.bethe_core import (
    ModelGeometry,
    QuantumNumbers,
    bae_defect,
    counting_functions,
    drive,
    kernel,
    log_ad,
    shift_function_finite,
    solve_bae,
    theta,
)
from nlsff.errors import DegenerateQuantumNumbers, DeltaTooLarge, InputError, RegimeMismatch


def test_geometry_lattice_sites_even_and_consistent():
    g = ModelGeometry.lattice(2.0, 10.0, delta=0.625)
    assert g.M == 16 and g.delta * g.M == pytest.approx(10.0, rel=1e-15)
    assert ModelGeometry.lattice(2.0, 10.0, M=8).delta == 1.25


@pytest.mark.parametrize("kwargs", [dict(delta=0.3), dict(delta=1.0 / 3.0 * 2)])
def test_geometry_rejects_odd_or_mismatched_sites(kwargs):
    with pytest.raises(InputError):
        ModelGeometry.lattice(2.0, 10.0, **kwargs)


def test_geometry_rejects_nonpositive():
    with pytest.raises(InputError):
        ModelGeometry.continuum(-1.0, 10.0)
    with pytest.raises(InputError):
        ModelGeometry(2.0, 10.0, 0.625, 15)


def test_lattice_point():
    assert ModelGeometry.lattice(2.0, 10.0, delta=0.1).nu == pytest.approx(-19j)
    with pytest.raises(RegimeMismatch):
        ModelGeometry.continuum(2.0, 10.0).nu


def test_theta_and_kernel_closed_forms(rng):
    c = 1.7
    x = rng.normal(size=50) * 3
    np.testing.assert_allclose(theta(x, c), 2 * np.arctan(x / c), rtol=0, atol=1e-15)
    np.testing.assert_allclose(kernel(x, c), 2 * c / (x * x + c * c), rtol=1e-15)
    z = x + 0.3j * rng.uniform(-1, 1, size=50)
    np.testing.assert_allclose(theta(z, c), 1j * np.log((1j * c + z) / (1j * c - z)), rtol=1e-13)
    # complex branch agrees with the real one on the axis
    np.testing.assert_allclose(theta(x + 0j, c).real, theta(x, c), atol=1e-14)
    h = 1e-6
    np.testing.assert_allclose((theta(x + h, c) - theta(x - h, c)) / (2 * h), kernel(x, c), rtol=1e-8)


def test_lattice_drive_tends_to_continuum():
    lam = np.linspace(-1, 1, 7)
    L = 10.0
    errs = [np.max(np.abs(drive(lam, ModelGeometry.lattice(2.0, L, delta=d)) - lam * L)) for d in (0.02, 0.01)]
    assert errs[1] < 0.3 * errs[0]


def test_log_ad_vanishes_at_lattice_point():
    g = ModelGeometry.lattice(2.0, 10.0, delta=0.5)
    la, _ = log_ad(np.array([g.nu]), g)
    assert np.real(la[0]) == -np.inf


@pytest.mark.parametrize("ell,expected", [(1, 0.0), (3, 4 * np.pi / 10)])
def test_one_body_continuum(ell, expected):
    st_ = solve_bae([ell], ModelGeometry.continuum(2.0, 10.0))
    assert st_.roots[0] == pytest.approx(expected, abs=1e-14)


def test_two_body_ground_symmetric():
    st_ = solve_bae([1, 2], ModelGeometry.continuum(2.0, 10.0))
    assert st_.roots[0] == pytest.approx(-st_.roots[1], abs=1e-14)
    assert np.max(np.abs(bae_defect(st_.roots, st_.qn, st_.geometry))) < 1e-12


def test_degenerate_quantum_numbers():
    with pytest.raises(DegenerateQuantumNumbers):
        QuantumNumbers((1, 1))
    with pytest.raises(DegenerateQuantumNumbers):
        solve_bae([3, 2], ModelGeometry.continuum(2.0, 10.0))


def test_delta_too_large():
    with pytest.raises(DeltaTooLarge):
        solve_bae([1, 6], ModelGeometry.lattice(2.0, 12.0, delta=3.0))


ells_strategy = st.lists(st.integers(-6, 8), min_size=1, max_size=5, unique=True).map(sorted)


@given(ells=ells_strategy, c=st.floats(0.2, 10.0), L=st.floats(3.0, 40.0))
def test_solver_residual_and_repulsion(ells, c, L):
    s = solve_bae(ells, ModelGeometry.continuum(c, L))
    assert s.residual < 1e-12
    assert np.all(np.diff(s.roots) > 0)
    xi, xip = counting_functions(s)
    np.testing.assert_allclose(xi(s.roots), np.array(ells) / L, atol=1e-12)
    w = np.linspace(-20, 20, 101)
    assert np.all(xip(w) > 1 / (2 * np.pi))


@given(ells=ells_strategy, c=st.floats(0.2, 10.0))
def test_parity(ells, c):
    g = ModelGeometry.continuum(c, 12.0)
    qn = QuantumNumbers(tuple(ells))
    a = solve_bae(qn, g).roots
    b = solve_bae(qn.parity_partner(), g).roots
    np.testing.assert_allclose(b, -a[::-1], atol=1e-12)


def test_free_fermion_limit():
    ells = [1, 2, 4, 7]
    L = 10.0
    s = solve_bae(ells, ModelGeometry.continuum(1e6, L))
    free = 2 * np.pi * (np.array(ells) - 2.5) / L
    np.testing.assert_allclose(s.roots, free, rtol=1e-4)


def test_counting_function_one_body():
    s = solve_bae([1], ModelGeometry.continuum(2.0, 10.0))
    xi, _ = counting_functions(s)
    assert xi(0.0) == pytest.approx(0.1, abs=1e-15)


def test_shift_function_identity(rng):
    g = ModelGeometry.continuum(2.0, 10.0)
    w = np.linspace(-30, 30, 1000)
    for mu_ells, lam_ells in (([1], []), ([1, 2], [1]), ([1, 2, 3], [1, 2]), ([0, 1, 3], [1, 2]),
                              ([1, 2, 3, 4, 5], [1, 2, 3, 4]), ([-1, 1, 2, 3, 6], [1, 2, 3, 4])):
        F = shift_function_finite(solve_bae(mu_ells, g), solve_bae(lam_ells, g))
        np.testing.assert_allclose(F.exp_direct(w), F.exp_product(w), atol=1e-12)


def test_shift_function_is_counting_difference():
    g = ModelGeometry.continuum(2.0, 10.0)
    w = np.linspace(-30, 30, 1000)
    mu = solve_bae([1, 2, 3], g)
    lam = solve_bae([1, 2], g)
    F = shift_function_finite(mu, lam)
    xm, _ = counting_functions(mu)
    xl, _ = counting_functions(lam)
    np.testing.assert_allclose(F(w), g.L * (xl(w) - xm(w)), atol=1e-12)
    assert abs(F.exp_product(np.array([1e9]))[0] - 1) < 1e-8


def test_shift_function_single_root():
    g = ModelGeometry.continuum(2.0, 10.0)
    mu = solve_bae([2], g)
    F = shift_function_finite(mu, solve_bae([], g))
    w = np.linspace(-5, 5, 11)
    m = mu.roots[0]
    np.testing.assert_allclose(F.exp_product(w), (m - w + 2j) / (m - w - 2j), rtol=1e-15)
    np.testing.assert_allclose(np.abs(F.exp_direct(w)), 1.0, atol=1e-15)


def test_lattice_roots_converge_to_continuum():
    # the lattice drive is even in delta (the two single-site factors carry
    # +-c delta/4), so the roots approach the continuum ones at second order
    L, c = 10.0, 2.0
    ells = [1, 2]
    cont = solve_bae(ells, ModelGeometry.continuum(c, L)).roots
    errs = [np.max(np.abs(solve_bae(ells, ModelGeometry.lattice(c, L, delta=d)).roots - cont))
            for d in (0.02, 0.01, 0.005)]
    ratios = np.array(errs[:-1]) / errs[1:]
    assert np.all((ratios > 3.2) & (ratios < 4.8))
