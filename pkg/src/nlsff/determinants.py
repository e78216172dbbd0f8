"""Finite-size determinant formulas: scalar products, norms and form factors of
the conjugated field, plus the smooth/discrete split of the normalised
squared form factor.

Large products are accumulated as complex logarithms (branch is irrelevant,
only ``exp`` of the total is used) so that lattice prefactors such as
``d(mu)**(M/2)`` never overflow before they cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bethe_core import (
    BetheState,
    CountingFunction,
    ModelGeometry,
    kernel,
    log_ad,
    shift_function_finite,
)
from .errors import (
    GeometryMismatch,
    InputError,
    NonPositiveResult,
    RegimeMismatch,
    RootCollision,
    SeparationTooSmall,
)

EPS_SEP = 1e-8
IMAG_TOL = 1e-10


def logdet(A) -> complex:
    """Complex log-determinant via pivoted LU (``-inf`` real part if singular)."""
    A = np.asarray(A, dtype=complex)
    if A.shape[0] == 0:
        return 0j
    sign, ld = np.linalg.slogdet(A)
    if sign == 0:
        return complex(-np.inf, 0.0)
    return complex(ld, np.angle(sign))


def logprod(values) -> complex:
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return 0j
    return complex(np.sum(np.log(values)))


def log_cauchy_det(x, y) -> complex:
    """log of ``det[1/(x_a - y_b)]`` from its closed product form."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    iu = np.triu_indices(x.size, 1)
    num = logprod((x[None, :] - x[:, None])[iu]) + logprod((y[:, None] - y[None, :])[iu])
    return num - logprod((x[:, None] - y[None, :]).ravel())


def cauchy_det(x, y) -> complex:
    """``det[1/(x_a - y_b)]`` from its closed product form."""
    return complex(np.exp(log_cauchy_det(x, y)))


def _min_sep(x, y):
    if len(x) == 0 or len(y) == 0:
        return np.inf
    return float(np.min(np.abs(np.asarray(x)[:, None] - np.asarray(y)[None, :])))


def _t(x, y, c):
    return -1j * c / ((x - y) * (x - y - 1j * c))


def _slavnov_log(mu, lam, geometry: ModelGeometry) -> complex:
    """log of the Slavnov overlap with per-column rescaling of ``a``, ``d``."""
    c = geometry.c
    mu = np.asarray(mu, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    n = mu.size
    la, ld = log_ad(lam, geometry)
    _, ld_mu = log_ad(mu, geometry)
    scale = np.maximum(la.real, ld.real)
    diff = mu[:, None] - lam[None, :]
    pm = np.prod(diff - 1j * c, axis=0)  # prod_a (mu_a - lam_k - ic)
    pp = np.prod(diff + 1j * c, axis=0)
    tml = _t(mu[:, None], lam[None, :], c)
    tlm = _t(lam[None, :], mu[:, None], c)
    Om = np.exp(la - scale)[None, :] * tml * pm[None, :] - np.exp(ld - scale)[None, :] * tlm * pp[None, :]
    total = logdet(Om) + np.sum(scale) + np.sum(ld_mu)
    den = [(mu[a] - mu[b]) * (lam[b] - lam[a]) for a in range(n) for b in range(a)]
    return total - logprod(den)


def slavnov_overlap(mu_state, lam, geometry: Optional[ModelGeometry] = None, eps_sep: float = EPS_SEP) -> complex:
    """``<psi(mu)|psi(lam)>`` with ``mu`` on-shell and ``lam`` arbitrary.

    ``mu_state`` is a solved :class:`BetheState` (or raw roots together with
    ``geometry``).  Continuum geometries use ``a = exp(-i lam L/2)``,
    ``d = exp(i lam L/2)``.
    """
    mu, geometry = _roots_and_geometry(mu_state, geometry)
    lam = np.asarray(lam, dtype=complex)
    if lam.size != mu.size:
        raise InputError("both sets need the same number of rapidities")
    if lam.size == 0:
        return 1.0 + 0j
    if _min_sep(mu, lam) < eps_sep:
        raise SeparationTooSmall(f"on-shell and generic sets closer than {eps_sep}")
    if np.min(np.abs(lam[:, None] - lam[None, :]) + np.eye(lam.size)) == 0:
        raise SeparationTooSmall("generic rapidities must be pairwise distinct")
    return complex(np.exp(_slavnov_log(mu, lam, geometry)))


def _roots_and_geometry(state, geometry):
    if isinstance(state, BetheState):
        if geometry is not None and geometry != state.geometry:
            raise GeometryMismatch("state geometry differs from the one supplied")
        return np.asarray(state.roots, dtype=complex), state.geometry
    if geometry is None:
        raise InputError("raw roots need an explicit geometry")
    return np.asarray(state, dtype=complex), geometry


def gaudin_matrix(state: BetheState) -> np.ndarray:
    """``Xi_jk = delta_jk - K(mu_j - mu_k) / (2 pi L xi'(mu_k))``."""
    mu = np.asarray(state.roots, dtype=float)
    g = state.geometry
    xp = CountingFunction(state).derivative(mu)
    K = kernel(mu[:, None] - mu[None, :], g.c)
    return np.eye(mu.size) - K / (2 * np.pi * g.L * xp)[None, :]


def _gaudin_log(state: BetheState) -> complex:
    mu = np.asarray(state.roots, dtype=float)
    n = mu.size
    if n == 0:
        return 0j
    g = state.geometry
    c = g.c
    xp = CountingFunction(state).derivative(mu)
    la, ld = log_ad(mu, g)
    total = logprod(2j * np.pi * g.L * xp) + np.sum(la + ld)
    diff = mu[:, None] - mu[None, :]
    total += logprod((diff - 1j * c).ravel())
    off = diff[~np.eye(n, dtype=bool)]
    total -= logprod(off)
    return total + logdet(gaudin_matrix(state))


def log_gaudin_norm(state: BetheState) -> float:
    """Natural log of the squared norm; checks that the norm is real positive."""
    lv = _gaudin_log(state)
    phase = np.exp(1j * lv.imag)
    if abs(phase.imag) > IMAG_TOL or phase.real <= 0:
        raise NonPositiveResult(f"norm has phase {phase}")
    return float(lv.real)


def gaudin_norm(state: BetheState) -> float:
    """Squared norm of an on-shell Bethe state (real and positive)."""
    return float(np.exp(log_gaudin_norm(state)))


@dataclass
class FormFactorValue:
    value: complex
    parts: Optional[dict] = field(default=None, repr=False)


def _ff_value(logpre, ld, U) -> FormFactorValue:
    with np.errstate(over="ignore"):
        parts = {
            "prefactor": complex(np.exp(logpre)),
            "determinant": complex(np.exp(ld)),
            "U": U,
            "log_value": complex(logpre + ld),
        }
        return FormFactorValue(complex(np.exp(logpre + ld)), parts)


def _check_ff_states(mu_state: BetheState, lam_state: BetheState, eps_sep: float):
    if mu_state.geometry != lam_state.geometry:
        raise GeometryMismatch("form factor states must share a geometry")
    if mu_state.n != lam_state.n + 1:
        raise InputError(f"need N+1 and N roots, got {mu_state.n} and {lam_state.n}")
    if _min_sep(mu_state.roots, lam_state.roots) < eps_sep:
        raise RootCollision("a root of the N+1 state coincides with one of the N state")


def _u_matrix(mu, lam, E, c, kern):
    """``U_jk`` of the form-factor determinant; ``kern[j, k]`` is the kernel
    evaluated at ``(lam_j, lam_k)`` and ``E`` is ``exp(-2 i pi F(lam))``."""
    n = lam.size
    U = np.empty((n, n), dtype=complex)
    for j in range(n):
        pre = -1j * np.prod((lam[j] - mu) / (lam[j] - mu + 1j * c))
        pre *= np.prod(lam[j] - lam + 1j * c)
        others = np.delete(lam, j)
        pre /= np.prod(lam[j] - others)
        U[j, :] = pre * kern[j, :] / (E[j] - 1.0)
    return U


def ff_det_continuum(mu_state: BetheState, lam_state: BetheState, eps_sep: float = EPS_SEP) -> FormFactorValue:
    """Form factor ``<mu|Phi^dagger(0)|lam>`` of the continuum model."""
    _check_ff_states(mu_state, lam_state, eps_sep)
    g = mu_state.geometry
    if g.is_lattice:
        raise RegimeMismatch("use ff_det_lattice for lattice states")
    c, L = g.c, g.L
    mu = np.asarray(mu_state.roots, dtype=complex)
    lam = np.asarray(lam_state.roots, dtype=complex)
    E = shift_function_finite(mu_state, lam_state).exp_product(lam.real)
    logpre = math.log(math.sqrt(c)) + 0.5j * np.pi + np.sum(0.5j * L * mu)
    for k in range(lam.size):
        logpre += -0.5j * L * lam[k] + np.log(1.0 - E[k])
        logpre += logprod((mu - lam[k] - 1j * c) / (mu - lam[k]))
    U = _u_matrix(mu, lam, E, c, kernel(lam[:, None] - lam[None, :], c))
    A = np.eye(lam.size) + U
    ld = logdet(A)
    return _ff_value(logpre, ld, U)


def kernel_nu(w, wp, c: float, nu: complex):
    """Lattice-modified kernel ``K(w, w' | nu)``."""
    w = np.asarray(w, dtype=complex)
    wp = np.asarray(wp, dtype=complex)
    K = 2.0 * c / ((w - wp) ** 2 + c * c)
    corr = -1j * (1.0 - (nu - wp + 1j * c) / (nu - wp - 1j * c)) * (1.0 / (w - wp + 1j * c) - 1.0 / (w - nu + 1j * c))
    return (nu - w - 1j * c) / (nu - w) * (K + corr)


def ff_det_lattice(mu_state: BetheState, lam_state: BetheState, eps_sep: float = EPS_SEP) -> FormFactorValue:
    """Lattice approximation of the conjugated-field form factor (determinant form)."""
    _check_ff_states(mu_state, lam_state, eps_sep)
    g = mu_state.geometry
    if not g.is_lattice:
        raise RegimeMismatch("ff_det_lattice needs a lattice geometry")
    c, nu = g.c, g.nu
    mu = np.asarray(mu_state.roots, dtype=complex)
    lam = np.asarray(lam_state.roots, dtype=complex)
    E = shift_function_finite(mu_state, lam_state).exp_product(lam.real)
    la_lam, _ = log_ad(lam, g)
    _, ld_mu = log_ad(mu, g)
    logpre = math.log(2.0 * math.sqrt(c) / g.delta) + 1j * np.pi
    logpre += logprod((nu - mu) / (nu - mu - 1j * c))
    logpre += logprod(lam - nu + 1j * c) - logprod(mu - nu)
    logpre -= logprod((mu[:, None] - lam[None, :]).ravel())
    logpre += np.sum(ld_mu)
    for k in range(lam.size):
        logpre += la_lam[k] + np.log(1.0 - E[k]) + logprod(mu - lam[k] - 1j * c)
    kern = kernel_nu(lam[:, None], lam[None, :], c, nu)
    U = _u_matrix(mu, lam, E, c, kern)
    ld = logdet(np.eye(lam.size) + U)
    return _ff_value(logpre, ld, U)


def ff_lattice_via_overlap(mu_state: BetheState, lam_state: BetheState) -> complex:
    """Lattice form factor from the scalar product with ``lam_{N+1} = nu``.

    Independent of the reduced determinant: ``a(nu) = 0`` and the ``d(nu)``
    column factor is divided out analytically.
    """
    _check_ff_states(mu_state, lam_state, EPS_SEP)
    g = mu_state.geometry
    c, nu = g.c, g.nu
    mu = np.asarray(mu_state.roots, dtype=complex)
    lam = np.append(np.asarray(lam_state.roots, dtype=complex), nu)
    _, ld_nu = log_ad(nu, g)
    val = _slavnov_log(mu, lam, g) - ld_nu
    val += logprod((nu - mu) / (nu - mu - 1j * c))
    return complex(2j / (g.delta * math.sqrt(c)) * np.exp(val))


@dataclass
class NormalizedFFSquared:
    direct: float
    smooth_part: float
    discrete_part: float

    @property
    def product(self) -> float:
        return self.smooth_part * self.discrete_part


def w_factor(z, w, c: float) -> complex:
    """``prod_{a,b} (z_a-w_b-ic)(w_a-z_b-ic) / ((z_a-z_b-ic)(w_a-w_b-ic))``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = logprod((z[:, None] - w[None, :] - 1j * c).ravel()) + logprod((w[:, None] - z[None, :] - 1j * c).ravel())
    den = logprod((z[:, None] - z[None, :] - 1j * c).ravel()) + logprod((w[:, None] - w[None, :] - 1j * c).ravel())
    return complex(np.exp(num - den))


def _split_top(mu_state: BetheState):
    """The root with quantum number ``N + 1`` (largest quantum number if that
    one is a hole) and the remaining ``N`` roots."""
    ells = mu_state.qn.ells
    n1 = len(ells)
    idx = ells.index(n1) if n1 in ells else int(np.argmax(ells))
    mu = np.asarray(mu_state.roots, dtype=float)
    return mu[idx], np.delete(mu, idx)


def smooth_part_finite(mu_state: BetheState, lam_state: BetheState) -> float:
    c = mu_state.geometry.c
    top, rest = _split_top(mu_state)
    lam = np.asarray(lam_state.roots, dtype=float)
    ff = ff_det_continuum(mu_state, lam_state)
    detU = ff.parts["determinant"]
    val = w_factor(rest, lam, c).real
    val *= np.prod(np.abs((lam - top - 1j * c) / (rest - top - 1j * c)) ** 2)
    val *= abs(detU) ** 2
    val /= np.linalg.det(gaudin_matrix(mu_state)) * np.linalg.det(gaudin_matrix(lam_state))
    return float(val)


def discrete_part_finite(mu_state: BetheState, lam_state: BetheState) -> float:
    g = mu_state.geometry
    mu = np.asarray(mu_state.roots, dtype=float)
    top, rest = _split_top(mu_state)
    lam = np.asarray(lam_state.roots, dtype=float)
    F = shift_function_finite(mu_state, lam_state)
    logv = np.sum(np.log(4.0 * np.sin(np.pi * F(lam)) ** 2))
    logv -= np.sum(np.log(2 * np.pi * g.L * CountingFunction(mu_state).derivative(mu)))
    logv -= np.sum(np.log(2 * np.pi * g.L * CountingFunction(lam_state).derivative(lam)))
    logv += 2.0 * np.sum(np.log(np.abs((rest - top) / (lam - top))))
    logv += 2.0 * log_cauchy_det(rest, lam).real
    return float(np.exp(logv))


def normalized_ff_parts(mu_state: BetheState, lam_state: BetheState) -> NormalizedFFSquared:
    """Normalised ``|<mu|Phi^dagger(0)|lam>|^2`` directly and as smooth x discrete."""
    if mu_state.geometry.is_lattice:
        raise RegimeMismatch("normalized_ff_parts works in the continuum")
    log_ff = ff_det_continuum(mu_state, lam_state).parts["log_value"]
    direct = np.exp(2 * log_ff.real - log_gaudin_norm(mu_state) - log_gaudin_norm(lam_state))
    return NormalizedFFSquared(
        direct=float(direct),
        smooth_part=smooth_part_finite(mu_state, lam_state),
        discrete_part=discrete_part_finite(mu_state, lam_state),
    )
