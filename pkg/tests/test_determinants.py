import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlsff.bethe_core import ModelGeometry, QuantumNumbers, solve_bae
from nlsff.determinants import (
    cauchy_det,
    ff_det_continuum,
    ff_det_lattice,
    ff_lattice_via_overlap,
    gaudin_norm,
    log_cauchy_det,
    log_gaudin_norm,
    normalized_ff_parts,
    slavnov_overlap,
)
from nlsff.errors import RegimeMismatch, RootCollision, SeparationTooSmall
from nlsff.oracles import continuum_ff_oracle, continuum_overlap_oracle, lattice_overlap_oracle

C, L = 2.0, 10.0
G = ModelGeometry.continuum(C, L)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_slavnov_one_body_closed_form():
    mu = solve_bae([2], G)
    for lam in (0.13, -0.71, 1.9):
        d = lam - mu.roots[0]
        assert slavnov_overlap(mu, [lam]) == pytest.approx(2 * C * np.sin(d * L / 2) / d, rel=1e-13)


def test_slavnov_one_body_lattice():
    g = ModelGeometry.lattice(C, L, M=8)
    mu = solve_bae([1], g)
    lam = np.array([0.27])
    assert rel(slavnov_overlap(mu, lam), np.conj(lattice_overlap_oracle(lam, mu.roots, g))) < 1e-10


def test_slavnov_orthogonality():
    a, b = solve_bae([1, 2], G), solve_bae([0, 2], G)
    assert abs(slavnov_overlap(a, b.roots)) < 1e-8 * math.sqrt(gaudin_norm(a) * gaudin_norm(b))


def test_slavnov_separation_guard():
    mu = solve_bae([1, 2], G)
    with pytest.raises(SeparationTooSmall):
        slavnov_overlap(mu, mu.roots + 1e-10)


def test_gaudin_small_cases():
    assert gaudin_norm(solve_bae([1], G)) == pytest.approx(C * L, rel=1e-14)
    assert gaudin_norm(solve_bae([], G)) == 1.0
    st2 = solve_bae([1, 3], G)
    assert rel(gaudin_norm(st2), continuum_overlap_oracle(st2.roots, st2.roots, C, L).real) < 1e-8


def test_norm_is_limit_of_overlap():
    state = solve_bae([1, 2, 4], G)
    r = np.array([0.3, -0.7, 0.5])
    eps = np.array([1e-3, 1e-4, 1e-5])
    vals = np.array([slavnov_overlap(state, state.roots + e * r).real for e in eps])
    # quadratic Richardson extrapolation to eps = 0
    coeffs = np.polyfit(eps, vals, 2)
    assert rel(coeffs[-1], gaudin_norm(state)) < 1e-6


def test_cauchy_determinant_closed_form(rng):
    x, y = rng.normal(size=4), rng.normal(size=4) + 3
    direct = np.linalg.det(1.0 / (x[:, None] - y[None, :]))
    assert cauchy_det(x, y) == pytest.approx(direct, rel=1e-12)
    assert np.exp(log_cauchy_det(x, y)) == pytest.approx(direct, rel=1e-12)


def test_ff_continuum_n0():
    mu = solve_bae([2], G)
    v = ff_det_continuum(mu, solve_bae([], G)).value
    assert v == pytest.approx(1j * math.sqrt(C) * np.exp(1j * L * mu.roots[0] / 2), rel=1e-14)


@pytest.mark.parametrize("mu_ells,lam_ells", [([1, 2], [1]), ([0, 2], [1]), ([1, 2, 3], [1, 2]), ([0, 1, 4], [1, 2])])
def test_ff_continuum_matches_oracle(mu_ells, lam_ells):
    mu, lam = solve_bae(mu_ells, G), solve_bae(lam_ells, G)
    ff = ff_det_continuum(mu, lam)
    assert rel(ff.value, continuum_ff_oracle(mu.roots, lam.roots, C, L)) < 1e-8
    assert ff.value == pytest.approx(ff.parts["prefactor"] * ff.parts["determinant"], rel=1e-12)


def test_ff_root_collision():
    g = ModelGeometry.continuum(C, 2 * np.pi)
    # a one-body root at 0 and a two-body state never share roots for c > 0;
    # force a collision by hand-building states with a common root
    mu = solve_bae([1, 2], g)
    lam = solve_bae([1], g)
    fake = type(lam)(lam.geometry, lam.qn, mu.roots[:1].copy())
    with pytest.raises(RootCollision):
        ff_det_continuum(mu, fake)


def test_ff_parity_invariance():
    mu, lam = solve_bae([0, 1, 4], G), solve_bae([1, 2], G)
    mu_p = solve_bae(mu.qn.parity_partner(), G)
    lam_p = solve_bae(lam.qn.parity_partner(), G)
    a = abs(ff_det_continuum(mu, lam).value)
    b = abs(ff_det_continuum(mu_p, lam_p).value)
    assert a == pytest.approx(b, rel=1e-12)


def test_ff_lattice_two_routes():
    for M in (8, 16, 40):
        g = ModelGeometry.lattice(C, L, M=M)
        mu, lam = solve_bae([1, 2, 3], g), solve_bae([1, 2], g)
        assert rel(ff_det_lattice(mu, lam).value, ff_lattice_via_overlap(mu, lam)) < 1e-10


def test_ff_lattice_converges_to_continuum():
    cont = ff_det_continuum(solve_bae([1, 2], G), solve_bae([1], G)).value
    errs = []
    for d in (0.02, 0.01, 0.005):
        g = ModelGeometry.lattice(C, L, delta=d)
        errs.append(rel(ff_det_lattice(solve_bae([1, 2], g), solve_bae([1], g)).value, cont))
    ratios = np.array(errs[:-1]) / errs[1:]
    assert np.all((ratios > 1.6) & (ratios < 2.4))


def test_normalized_ground_to_ground_bounded():
    parts = normalized_ff_parts(solve_bae([1, 2], G), solve_bae([1], G))
    assert 0 < parts.direct <= 1


def test_normalized_parts_need_continuum():
    g = ModelGeometry.lattice(C, L, M=8)
    with pytest.raises(RegimeMismatch):
        normalized_ff_parts(solve_bae([1, 2], g), solve_bae([1], g))


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("excitation", [None, (1, -1), (1, 5), (2, 7)])
def test_factorization_identity(N, excitation):
    if excitation is None:
        qn = QuantumNumbers.ground(N + 1)
    else:
        h, p = excitation
        if h > N + 1:
            pytest.skip("hole outside the sea")
        qn = QuantumNumbers.particle_hole(N + 1, [h], [p + (N - 1 if p > 0 else 0)])
    parts = normalized_ff_parts(solve_bae(qn, G), solve_bae(QuantumNumbers.ground(N), G))
    assert abs(parts.direct - parts.product) / parts.direct < 1e-8


def test_large_state_no_overflow():
    g = ModelGeometry.continuum(C, 128.0)
    mu, lam = solve_bae(QuantumNumbers.ground(65), g), solve_bae(QuantumNumbers.ground(64), g)
    assert np.isfinite(log_gaudin_norm(mu))
    parts = normalized_ff_parts(mu, lam)
    assert 0 < parts.direct < 1
    assert abs(parts.direct - parts.product) / parts.direct < 1e-8


on_shell = st.lists(st.integers(-3, 4), min_size=1, max_size=2, unique=True).map(sorted)


@given(mu_ells=on_shell, lam=st.lists(st.floats(-2.0, 2.0), min_size=2, max_size=2), c=st.floats(0.5, 4.0))
def test_slavnov_matches_continuum_oracle(mu_ells, lam, c):
    g = ModelGeometry.continuum(c, L)
    mu = solve_bae(mu_ells, g)
    lam = np.array(lam[: mu.n])
    if np.min(np.abs(lam[:, None] - mu.roots[None, :])) < 1e-3 or (lam.size == 2 and abs(lam[0] - lam[1]) < 1e-3):
        return
    ref = continuum_overlap_oracle(lam, mu.roots, c, L)
    val = slavnov_overlap(mu, lam)
    assert abs(val - np.conj(ref)) <= 1e-8 * max(abs(ref), 1e-3 * gaudin_norm(mu))
