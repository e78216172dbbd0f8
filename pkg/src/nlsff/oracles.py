"""Brute-force evaluations used to cross-check the determinant formulas.

Continuum: the coordinate Bethe wavefunction and exact integrals of
``conj(phi_mu) * phi_lam`` over the ordered simplex.  Lattice: the
combinatorial Fock-space sums over weakly increasing site tuples.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.linalg import expm

from .bethe_core import ModelGeometry
from .errors import RegimeMismatch
from .errors import CoincidingRapidities, CostGuardExceeded, OrderTooLarge

ORACLE_MAX_N = 3
FF_ORACLE_MAX_N = 2
LATTICE_MAX_M = 30
LATTICE_MAX_N = 3


def _check_distinct(rap):
    rap = np.asarray(rap)
    for a, b in itertools.combinations(range(rap.size), 2):
        if rap[a] == rap[b]:
            raise CoincidingRapidities(f"rapidities {a} and {b} coincide: {rap[a]}")


def _perm_amplitudes(rap, c):
    """``A_sigma = prod_{a<b} (r_s(a) - r_s(b) + ic) / (r_s(a) - r_s(b))`` for every
    permutation, i.e. the wavefunction coefficients on the ordered sector."""
    n = len(rap)
    perms = list(itertools.permutations(range(n)))
    amps = np.empty(len(perms), dtype=complex)
    waves = np.empty((len(perms), n), dtype=complex)
    for k, s in enumerate(perms):
        r = np.asarray([rap[i] for i in s], dtype=complex)
        amp = 1.0 + 0j
        for a in range(n):
            for b in range(a + 1, n):
                amp *= (r[a] - r[b] + 1j * c) / (r[a] - r[b])
        amps[k] = amp
        waves[k] = r
    return amps, waves


def bethe_wavefunction(positions, rapidities, c: float, L: float) -> complex:
    """Coordinate Bethe wavefunction with ``sgn(0) = 0``."""
    x = np.asarray(positions, dtype=float)
    lam = np.asarray(rapidities, dtype=complex)
    n = lam.size
    if x.size != n:
        raise ValueError("need as many positions as rapidities")
    _check_distinct(lam)
    sg = np.sign(x[:, None] - x[None, :])
    total = 0.0 + 0j
    for s in itertools.permutations(range(n)):
        r = lam[list(s)]
        term = 1.0 + 0j
        for a in range(n):
            for b in range(a + 1, n):
                term *= (r[a] - r[b] - 1j * c * sg[a, b]) / (r[a] - r[b])
        total += term * np.exp(1j * np.sum(r * (x - L / 2.0)))
    return (-1j * math.sqrt(c)) ** n * total


def simplex_exp_integral(k, L: float) -> complex:
    """``int_{0<x_1<...<x_n<L} exp(i sum_a k_a x_a) dx``.

    With gaps ``t_j = x_j - x_{j-1}`` the phase is ``sum_j s_j t_j`` where
    ``s_j`` are tail sums of ``k``; the integral over the scaled simplex equals
    the divided difference of ``exp(L z)`` on the nodes ``0, i s_1, ..., i s_n``,
    read off the corner of the exponential of a bidiagonal matrix.  Confluent
    and near-confluent nodes need no special casing.
    """
    k = np.asarray(k, dtype=complex)
    n = k.size
    if n == 0:
        return 1.0 + 0j
    s = np.cumsum(k[::-1])[::-1]
    z = np.concatenate([[0.0], 1j * s])
    A = np.diag(z) + np.diag(np.ones(n), 1)
    return complex(expm(L * A)[0, n])


def _fsum_complex(values) -> complex:
    values = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _sector_sum(mu_amps, mu_waves, lam_amps, lam_waves, L, fixed_zero):
    """Sum over both permutation sets of the ordered-sector integrals.

    ``fixed_zero`` means the bra carries one extra coordinate pinned at 0,
    which contributes ``exp(0)`` and is dropped from the integration.
    """
    terms = []
    for am, wm in zip(mu_amps, mu_waves):
        wm_free = wm[1:] if fixed_zero else wm
        # pinned coordinate: phase exp(-i conj(mu) (0 - L/2))
        pin = np.conj(np.exp(1j * wm[0] * (0.0 - L / 2.0))) if fixed_zero else 1.0
        for al, wl in zip(lam_amps, lam_waves):
            kk = wl - np.conj(wm_free)
            phase = np.exp(-1j * np.sum(kk) * L / 2.0)
            terms.append(np.conj(am) * al * pin * phase * simplex_exp_integral(kk, L))
    return _fsum_complex(terms)


def continuum_overlap_oracle(mu, lam, c: float, L: float, max_n: int = ORACLE_MAX_N) -> complex:
    """``int_{[0,L]^N} dx/N! conj(phi(x|mu)) phi(x|lam)`` evaluated exactly."""
    mu = np.asarray(mu, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    n = lam.size
    if mu.size != n:
        raise ValueError("both sets need N rapidities")
    if n > max_n:
        raise OrderTooLarge(f"N={n} exceeds the oracle guard {max_n}")
    if n == 0:
        return 1.0 + 0j
    _check_distinct(mu)
    _check_distinct(lam)
    am, wm = _perm_amplitudes(mu, c)
    al, wl = _perm_amplitudes(lam, c)
    return c**n * _sector_sum(am, wm, al, wl, L, fixed_zero=False)


def continuum_ff_oracle(mu, lam, c: float, L: float, max_n: int = FF_ORACLE_MAX_N) -> complex:
    """``int dx/N! conj(phi(0, x|mu)) phi(x|lam)`` for ``N+1`` roots ``mu``."""
    mu = np.asarray(mu, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    n = lam.size
    if mu.size != n + 1:
        raise ValueError("mu needs one more rapidity than lam")
    if n > max_n:
        raise OrderTooLarge(f"N={n} exceeds the oracle guard {max_n}")
    _check_distinct(mu)
    _check_distinct(lam)
    am, wm = _perm_amplitudes(mu, c)
    al, wl = _perm_amplitudes(lam, c)
    pref = np.conj((-1j * math.sqrt(c)) ** (n + 1)) * (-1j * math.sqrt(c)) ** n
    return pref * _sector_sum(am, wm, al, wl, L, fixed_zero=True)


# -- lattice ---------------------------------------------------------------
def _require_lattice(geometry):
    if not geometry.is_lattice:
        raise RegimeMismatch("lattice oracle needs a lattice geometry")


def alpha(lam, geometry: ModelGeometry):
    """Two-site vacuum factor; ``alpha(lam)**(M/2) == d(lam)``."""
    y = geometry.c * geometry.delta / 4.0
    x = 0.5j * np.asarray(lam, dtype=complex) * geometry.delta
    return (1.0 - y + x) * (1.0 + y + x)


def weak_tuples(M: int, n: int):
    """Weakly increasing tuples ``1 <= n_1 <= ... <= n_N <= M`` in lexicographic order."""
    return itertools.combinations_with_replacement(range(1, M + 1), n)


def lattice_f(sites, rapidities, geometry: ModelGeometry) -> complex:
    """Coefficient of ``beta*_{n_1} ... beta*_{n_N}|0>`` in the Bethe vector."""
    _require_lattice(geometry)
    n_arr = np.asarray(sites, dtype=int)
    lam = np.asarray(rapidities, dtype=complex)
    return _lattice_f_many(n_arr[None, :], lam, geometry)[0]


def _lattice_f_many(tuples, lam, geometry):
    """Vectorised ``f`` over a (T, N) array of site tuples."""
    T, n = tuples.shape
    if n == 0:
        return np.ones(T, dtype=complex)
    M, dl, c = geometry.M, geometry.delta, geometry.c
    al = alpha(lam, geometry)
    al_bar = alpha(-lam, geometry)
    lo = (tuples - 1) // 2
    hi = (M - tuples) // 2
    parity = np.where(tuples % 2 == 0, 1.0, -1.0)
    sg = np.sign(tuples[:, None, :] - tuples[:, :, None])  # sgn(n_b - n_a) at [a, b]
    out = np.zeros(T, dtype=complex)
    log_al, log_alb = np.log(al), np.log(al_bar)
    for s in itertools.permutations(range(n)):
        s = list(s)
        r = lam[s]
        term = np.ones(T, dtype=complex)
        for a in range(n):
            for b in range(a + 1, n):
                term *= (r[a] - r[b] + 1j * c * sg[:, a, b]) / (r[a] - r[b])
        expo = lo * log_al[s][None, :] + hi * log_alb[s][None, :]
        edge = 1.0 - parity * dl * (c / 4.0 - 0.5j * r[None, :])
        out += term * np.exp(expo.sum(axis=1)) * np.prod(edge, axis=1)
    return out


def _multiplicity_weights(tuples, geometry, extra_site=None):
    """``prod_k prod_{l<m_k} (Z_k + l dc/4) / m_k!`` for each tuple.

    This is ``<0|beta^m beta*^m|0> / (m!)^2`` per site, up to the global
    ``(delta c)^N``.  ``extra_site`` appends one more occupation (the bra of the
    form-factor sum) and multiplies by the resulting ``m'/1`` ratio.
    """
    dc = geometry.delta * geometry.c
    w = np.ones(tuples.shape[0])
    for i, tup in enumerate(tuples):
        occ = {}
        for site in tup:
            occ[site] = occ.get(site, 0) + 1
        ratio = 1.0
        if extra_site is not None:
            occ[extra_site] = occ.get(extra_site, 0) + 1
            ratio = occ[extra_site]
        val = ratio
        for site, m in occ.items():
            Z = 1.0 + (-1) ** site * dc / 4.0
            for l in range(m):
                val *= (Z + l * dc / 4.0) / (l + 1)
        w[i] = val
    return w


def _check_cost(geometry, n, max_m, max_n):
    if geometry.M > max_m or n > max_n:
        raise CostGuardExceeded(
            f"M={geometry.M}, N={n} beyond the combinatorial guard (M<={max_m}, N<={max_n})"
        )


def lattice_overlap_oracle(
    mu, lam, geometry: ModelGeometry, max_m: int = LATTICE_MAX_M, max_n: int = LATTICE_MAX_N
) -> complex:
    """``<psi(mu)|psi(lam)>`` on the lattice as a sum over site tuples."""
    _require_lattice(geometry)
    mu = np.asarray(mu, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    n = lam.size
    if mu.size != n:
        raise ValueError("both sets need N rapidities")
    if n == 0:
        return 1.0 + 0j
    _check_cost(geometry, n, max_m, max_n)
    tuples = np.array(list(weak_tuples(geometry.M, n)), dtype=int)
    fm = _lattice_f_many(tuples, mu, geometry)
    fl = _lattice_f_many(tuples, lam, geometry)
    w = _multiplicity_weights(tuples, geometry)
    return (geometry.delta * geometry.c) ** n * _fsum_complex(np.conj(fm) * fl * w)


def lattice_ff_oracle(
    mu, lam, geometry: ModelGeometry, max_m: int = LATTICE_MAX_M, max_n: int = LATTICE_MAX_N
) -> complex:
    """Leading part ``(1/2)<psi(mu)|beta*_M|psi(lam)>`` of the lattice form factor,
    rescaled by ``2i/(delta sqrt c)``.

    The neglected operator remainder is higher order in the spacing, so this
    agrees with the lattice determinant only up to corrections vanishing with
    ``delta``.
    """
    _require_lattice(geometry)
    mu = np.asarray(mu, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    n = lam.size
    if mu.size != n + 1:
        raise ValueError("mu needs one more rapidity than lam")
    _check_cost(geometry, n, max_m, max_n)
    M = geometry.M
    tuples = np.array(list(weak_tuples(M, n)), dtype=int).reshape(-1, n) if n else np.zeros((1, 0), dtype=int)
    full = np.concatenate([tuples, np.full((tuples.shape[0], 1), M)], axis=1)
    fm = _lattice_f_many(full, mu, geometry)
    fl = _lattice_f_many(tuples, lam, geometry)
    w = _multiplicity_weights(tuples, geometry, extra_site=M)
    dc = geometry.delta * geometry.c
    f1 = 0.5 * dc ** (n + 1) * _fsum_complex(np.conj(fm) * fl * w)
    return 2j / (geometry.delta * math.sqrt(geometry.c)) * f1
