"""Large-volume behaviour of the normalised field form factor.

Contains the Cauchy transform on (possibly bent) cuts from ``-q`` to ``q``,
the contour Fredholm determinants ``det(I + U)``, ``det(I + Ubar)``, the
smooth part ``G_n``, the discrete part ``D_0 R_{N,n}`` and the regularised
determinant continued in ``(beta, gamma)``, including automatic contour
deformation around zeros of ``exp(-2 i pi gamma nu_beta) - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import contour as ct
from .bethe_core import kernel
from .determinants import w_factor
from .errors import (
    ContourInvalid,
    DeformationImpossible,
    DenominatorZero,
    InputError,
    NumericalContractError,
    OnSegment,
)
from .special import (
    barnes_g,
    cauchy_det_real,
    kappa,
    aleph,
    log_barnes_g,
    log_gamma_checked,
    log_pochhammer_ratio,
    varphi_p,
)
from .thermo import ExcitationThermo, ShiftThermo, ThermoModel, gauss_legendre, shift_thermo, solve_increasing

CUT_NODES = 128
ON_SEGMENT_TOL = 1e-10
IMAG_TOL = 1e-8
DENOM_TOL = 1e-10
CHECK_DENOM_TOL = 1e-6
COLLISION_TOL = 1e-8
ZERO_CLEARANCE = 0.05


# -- cuts and Cauchy transforms ------------------------------------------------
@dataclass(frozen=True)
class CutPath:
    """Path from ``-q`` to ``q``: the segment, or a circular arc whose midpoint
    sits at ``i * sagitta``."""

    q: float
    sagitta: float = 0.0

    @property
    def straight(self) -> bool:
        return self.sagitta == 0.0

    def _circle(self):
        s, q = self.sagitta, self.q
        R = (q * q + s * s) / (2 * abs(s))
        return complex(0.0, s - np.sign(s) * R), R

    def quadrature(self, n: int = CUT_NODES):
        x, w = gauss_legendre(1.0, n)
        t = 0.5 * (x + 1.0)
        w = 0.5 * w
        if self.straight:
            return self.q * (2 * t - 1), 2 * self.q * w
        center, R = self._circle()
        a0 = np.angle(-self.q - center)
        a1 = np.angle(self.q - center)
        if self.sagitta > 0:  # upper arc runs clockwise from -q to q
            a0 = a0 if a0 > a1 else a0 + 2 * np.pi
        else:
            a1 = a1 if a1 > a0 else a1 + 2 * np.pi
        phi = a0 + (a1 - a0) * t
        e = np.exp(1j * phi)
        return center + R * e, 1j * R * (a1 - a0) * e * w

    def lens_side(self, lam) -> np.ndarray:
        """``+-1`` where ``lam`` lies between the arc and the segment, else 0."""
        lam = np.asarray(lam, dtype=complex)
        if self.straight:
            return np.zeros(lam.shape, dtype=int)
        center, R = self._circle()
        inside = (np.abs(lam - center) < R) & (np.sign(lam.imag) == np.sign(self.sagitta))
        return np.where(inside, int(np.sign(self.sagitta)), 0)

    def log_integral(self, lam):
        """``int_path dmu / (mu - lam)``."""
        lam = np.asarray(lam, dtype=complex)
        base = np.log((self.q - lam) / (-self.q - lam))
        return base - 2j * np.pi * self.lens_side(lam)

    def distance(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        if self.straight:
            x = np.clip(lam.real, -self.q, self.q)
            return np.abs(lam - x)
        pts, _ = self.quadrature(512)
        pts = np.concatenate([[-self.q], pts, [self.q]])
        return np.min(np.abs(lam[..., None] - pts), axis=-1)


def _bernstein_nodes(lam, q):
    """Gauss-Legendre order giving ~1e-16 for a pole at ``lam`` off ``[-q, q]``."""
    z = np.asarray(lam, dtype=complex) / q
    rho = np.abs(z + np.sqrt(z - 1) * np.sqrt(z + 1))
    rho = np.maximum(rho, 1.0 / np.maximum(rho, 1e-300))
    lr = np.log(np.max(rho)) if np.ndim(rho) == 0 else np.log(np.min(rho))
    return int(np.clip(np.ceil(20.0 / max(lr, 1e-3)), CUT_NODES, 4096))


def cauchy_transform(f: Callable, lam, q: float, cut: Optional[CutPath] = None, eval_radius: float = np.inf, n: int = CUT_NODES):
    """``(1/2 i pi) int_cut f(mu) / (mu - lam) dmu``.

    Points with ``|Im lam| < eval_radius`` (where ``f`` may be evaluated) use the
    singularity-subtracted form; the others are far from the cut and use the
    plain rule with enough nodes for the pole distance.
    """
    cut = cut or CutPath(q)
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    if np.any(cut.distance(lam) < ON_SEGMENT_TOL):
        raise OnSegment("Cauchy transform evaluated on the cut")
    out = np.empty(lam.shape, dtype=complex)
    near = np.abs(lam.imag) < eval_radius
    if np.any(near):
        mu, dmu = cut.quadrature(n)
        fm = np.asarray(f(mu), dtype=complex)
        ln = lam[near]
        fl = np.asarray(f(ln), dtype=complex)
        dq = ((fm[None, :] - fl[:, None]) / (mu[None, :] - ln[:, None])) @ dmu
        out[near] = (dq + fl * cut.log_integral(ln)) / (2j * np.pi)
    if np.any(~near):
        lf = lam[~near]
        nn = max(n, _bernstein_nodes(lf, q))
        mu, dmu = cut.quadrature(nn)
        fm = np.asarray(f(mu), dtype=complex)
        out[~near] = (1.0 / (mu[None, :] - lf[:, None])) @ (fm * dmu) / (2j * np.pi)
    return out[0] if scalar else out


def c0_functional(F: Callable, q: float, c: float, m: int = 96) -> float:
    """``-int int F(l) F(m) / (l - m - ic)^2 dl dm`` over ``[-q, q]^2``."""
    x, w = gauss_legendre(q, m)
    fx = np.asarray(F(x), dtype=complex)
    val = -(w * fx) @ (1.0 / (x[:, None] - x[None, :] - 1j * c) ** 2) @ (w * fx)
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val)):
        raise NumericalContractError(f"C0 has imaginary part {val.imag}")
    return float(val.real)


def c0_constant(q: float, c: float) -> float:
    """Closed form of the ``C0`` functional for ``F = 1``."""
    val = 2 * np.log(-1j * c) - np.log(2 * q - 1j * c) - np.log(-2 * q - 1j * c)
    return float((-val).real)


def fredholm_det_interval(model: ThermoModel) -> float:
    """``det(I - K/2pi)`` on ``[-q, q]``."""
    return model.fredholm_det()


# -- kernels ---------------------------------------------------------------------
class KernelU:
    """``gamma U[gamma nu](w, w')`` (or its barred partner) as a contour kernel.

    ``U`` factorises as ``row(w) K(w - w')``; row values are cached per node
    array so that building the Nystrom matrix costs one pass over the nodes.
    With ``gamma = 1`` this is the kernel ``U[nu]`` itself.
    """

    def __init__(self, nu: Callable, exc: ExcitationThermo, q: float, c: float, gamma: complex = 1.0,
                 cut: Optional[CutPath] = None, barred: bool = False, eval_radius: Optional[float] = None):
        self.nu, self.exc, self.q, self.c = nu, exc, float(q), float(c)
        self.gamma = complex(gamma)
        self.cut = cut or CutPath(q)
        self.barred = barred
        self.eval_radius = 0.5 * c if eval_radius is None else eval_radius
        self._cache_key = None
        self._cache_val = None

    def f(self, w):
        return self.gamma * np.asarray(self.nu(w), dtype=complex)

    def cauchy2(self, w):
        """``C[2 i pi gamma nu](w) = int gamma nu(mu) / (mu - w) dmu``."""
        return 2j * np.pi * cauchy_transform(self.f, w, self.q, self.cut, self.eval_radius)

    def denominator_factor(self, w):
        """``gamma / (exp(-+2 i pi gamma nu) - 1)``, finite as ``gamma -> 0``."""
        sgn = 1.0 if self.barred else -1.0
        if self.gamma == 0:
            return 1.0 / (sgn * 2j * np.pi * np.asarray(self.nu(w), dtype=complex))
        den = np.expm1(sgn * 2j * np.pi * self.f(w))
        if np.min(np.abs(den)) < DENOM_TOL:
            raise DenominatorZero("exp(-+2 i pi F) - 1 vanishes on the contour")
        return self.gamma / den

    def row(self, w):
        w = np.asarray(w, dtype=complex)
        key = (w.shape, w.tobytes())
        if key == self._cache_key:
            return self._cache_val
        c, q = self.c, self.q
        s = -1.0 if self.barred else 1.0  # shift direction +ic / -ic
        val = (s * -1.0 / (2 * np.pi)) * (w - q) / (w - q + s * 1j * c)
        for mp, mh in zip(self.exc.particles, self.exc.holes):
            val = val * (w - mp) * (w - mh + s * 1j * c) / ((w - mh) * (w - mp + s * 1j * c))
        val = val * np.exp(self.cauchy2(w) - self.cauchy2(w + s * 1j * c))
        val = val * self.denominator_factor(w)
        self._cache_key, self._cache_val = key, val
        return val

    def __call__(self, w, wp):
        w = np.asarray(w, dtype=complex)
        wp = np.asarray(wp, dtype=complex)
        if w.ndim == 2 and w.shape[1] == 1:
            r = self.row(w[:, 0])[:, None]
        else:
            r = self.row(w)
        return r * kernel(w - wp, self.c)


def kernel_U(F: Callable, exc: ExcitationThermo, model: ThermoModel, cut: Optional[CutPath] = None) -> KernelU:
    return KernelU(F, exc, model.q, model.c, 1.0, cut)


def kernel_Ubar(F: Callable, exc: ExcitationThermo, model: ThermoModel, cut: Optional[CutPath] = None) -> KernelU:
    return KernelU(F, exc, model.q, model.c, 1.0, cut, barred=True)


# -- admissible contours -----------------------------------------------------------
@dataclass
class ContourReport:
    ok: bool
    min_denominator: float
    zeros_inside: int
    holes_inside: bool
    particles_outside: bool
    message: str = ""


@dataclass
class AdmissibleContour:
    contour: ct.ClosedContour
    cut: CutPath
    zeros: List[complex]
    excised: List[complex]


def default_half_height(q: float, c: float, reach: float) -> float:
    h = min(0.4 * c, 0.5 * c)
    return min(h, 0.9 * reach)


def default_reach(q: float, exc: ExcitationThermo) -> float:
    reach = 1.1 * q
    outside = [abs(p) for p in exc.particles]
    if outside:
        reach = min(reach, q + 0.5 * (min(outside) - q))
    return reach


def base_contour(q: float, c: float, exc: ExcitationThermo, half_height: Optional[float] = None,
                 n_nodes: int = ct.DEFAULT_CONTOUR_NODES) -> ct.ClosedContour:
    reach = default_reach(q, exc)
    h = default_half_height(q, c, reach) if half_height is None else half_height
    return ct.stadium(reach, h, n_nodes)


def _exp_minus_one(f: Callable, sign: float = -1.0):
    return lambda z: np.expm1(sign * 2j * np.pi * np.asarray(f(z), dtype=complex))


def contour_check(g: Callable, exc: ExcitationThermo, contour: ct.ClosedContour, raise_on_fail: bool = True) -> ContourReport:
    """Denominator bound, zero count and hole/particle placement on ``contour``.

    ``g`` is ``lambda -> exp(-2 i pi F(lambda)) - 1`` (any function whose zeros
    must stay outside).
    """
    z, _ = contour.quadrature()
    mind = float(np.min(np.abs(g(z))))
    zeros = 0
    for pts in contour.polyline():
        w = ct.phase_winding(g, pts)
        if not np.isfinite(w):
            w = ct.phase_winding(g, np.concatenate([np.linspace(a, b, 8, endpoint=False) for a, b in zip(pts, np.roll(pts, -1))]))
        zeros += int(round(w)) if np.isfinite(w) else 10 ** 6
    holes_ok = all(contour.winding(h) == 1 for h in exc.holes)
    parts_ok = all(contour.winding(p) == 0 for p in exc.particles)
    msgs = []
    if mind <= CHECK_DENOM_TOL:
        msgs.append(f"|exp(-2i pi F) - 1| = {mind:.2e} on the contour")
    if zeros != 0:
        msgs.append(f"{zeros} zero(s) of exp(-2i pi F) - 1 enclosed")
    if not holes_ok:
        msgs.append("a hole rapidity is not enclosed")
    if not parts_ok:
        msgs.append("a particle rapidity is enclosed")
    rep = ContourReport(not msgs, mind, zeros, holes_ok, parts_ok, "; ".join(msgs))
    if raise_on_fail and not rep.ok:
        raise ContourInvalid(rep.message)
    return rep


def admissible_contour(g: Callable, q: float, c: float, exc: ExcitationThermo, half_height: Optional[float] = None,
                       n_nodes: int = ct.DEFAULT_CONTOUR_NODES) -> AdmissibleContour:
    """Stadium around the cut with zeros of ``g`` excised (bending the cut away
    from zeros that sit too close to it)."""
    outer = base_contour(q, c, exc, half_height, n_nodes).with_singular([q, -q, *exc.holes])
    reach = default_reach(q, exc)
    h = outer.pieces()[0].a.imag * -1.0
    pad = 1.5 * ZERO_CLEARANCE * h
    zeros = ct.find_zeros(g, -reach - pad, reach + pad, -h - pad, h + pad)
    close = [z for z in zeros if outer.distance(z) < ZERO_CLEARANCE * h]
    if close:
        raise ContourInvalid(f"zero {close[0]} of the denominator lies within {ZERO_CLEARANCE:g}*h of the contour; "
                             "choose another half height")
    inside = [z for z in zeros if outer.winding(z) == 1]
    if not inside:
        return AdmissibleContour(outer, CutPath(q), zeros, [])
    anchors = [complex(q), complex(-q)] + [complex(x) for x in exc.holes]
    for z in inside:
        if min(abs(z - a) for a in anchors) < COLLISION_TOL:
            raise DeformationImpossible(f"zero {z} of exp(-2 i pi nu) - 1 collides with an endpoint or hole")
    seg = CutPath(q)

    def free_radius(z, cut):
        others = [abs(z - w) for w in inside if w != z]
        d = [abs(z - a) for a in anchors] + others + [outer.distance(z), float(cut.distance(z))]
        return 0.45 * min(d)

    near = [z for z in inside if float(seg.distance(z)) < 0.25 * min(abs(z - a) for a in anchors)]
    cut = seg
    if near:
        sides = {np.sign(z.imag) for z in near}
        if len(sides) > 1 or 0.0 in sides:
            raise DeformationImpossible("zeros close to the cut on both sides (or on it)")
        side = sides.pop()
        depth = min(0.5 * h, 0.5 * min(abs(z.imag) for z in inside if np.sign(z.imag) != side) if any(np.sign(z.imag) != side for z in inside) else 0.5 * h)
        cut = CutPath(q, -side * depth)
    radii = [free_radius(z, cut) for z in inside]
    if min(radii) <= 0:
        raise DeformationImpossible("no room to excise a zero")
    contour = outer.with_excisions(inside, radii)
    return AdmissibleContour(contour, cut, zeros, inside)


# -- smooth part -------------------------------------------------------------------
@dataclass
class SmoothPartResult:
    value: float
    det_U: complex
    det_Ubar: complex
    interval_det: float
    c0: float
    contour_report: ContourReport
    nodes: int
    refined_nodes: int
    node_doubling_change: float


def smooth_part(model: ThermoModel, exc: ExcitationThermo, F: Optional[Callable] = None,
                half_height: Optional[float] = None, n_nodes: int = ct.DEFAULT_CONTOUR_NODES) -> SmoothPartResult:
    """``G_n`` evaluated with contour Fredholm determinants."""
    F = F or shift_thermo(model, exc)
    q, c = model.q, model.c
    g = _exp_minus_one(F)
    adm = admissible_contour(g, q, c, exc, half_height, n_nodes)
    report = contour_check(g, exc, adm.contour)
    U = KernelU(F, exc, q, c, 1.0, adm.cut)
    Ub = KernelU(F, exc, q, c, 1.0, adm.cut, barred=True)
    dU = ct.fredholm_det_contour(U, adm.contour)
    dUb = ct.fredholm_det_contour(Ub, adm.contour)
    er = 0.5 * c

    def CF(lam):
        return cauchy_transform(F, lam, q, adm.cut, er)

    val = 1.0 + 0j
    for mp, mh in zip(exc.particles, exc.holes):
        for eps in (1.0, -1.0):
            val *= (mh - q + eps * 1j * c) / (mp - q + eps * 1j * c)
            val *= np.exp(2j * np.pi * (CF(mh + eps * 1j * c) - CF(mp + eps * 1j * c)))
    val *= np.exp(-2j * np.pi * (CF(q + 1j * c) + CF(q - 1j * c)))
    idet = fredholm_det_interval(model)
    val /= idet ** 2
    c0 = c0_functional(F, q, c)
    val *= np.exp(c0)
    if exc.n:
        val *= w_factor(np.array(exc.particles), np.array(exc.holes), c)
    val *= dU.value * dUb.value
    if abs(val.imag) > IMAG_TOL * abs(val):
        raise NumericalContractError(f"smooth part has imaginary residue {val.imag:.3e} (value {val.real:.6e})")
    return SmoothPartResult(float(val.real), dU.value, dUb.value, idet, c0, report,
                            dU.nodes, dU.refined_nodes, max(dU.relative_change, dUb.relative_change))


# -- discrete part -------------------------------------------------------------------
def excited_rapidity(model: ThermoModel, F: Callable, N: int, L: float) -> float:
    """``lambda_{N+1}`` solving ``L xi(lambda) + F(lambda) = N + 1``."""
    f = lambda x: float((L * model.counting(x) + F(x)).real)
    fp = lambda x: float((L * model.counting_prime(x) + F.derivative(x)).real)
    return solve_increasing(f, fp, N + 1.0, x0=model.q)


def discrete_part(model: ThermoModel, exc: ExcitationThermo, N: int, L: float, F: Optional[ShiftThermo] = None) -> float:
    """``D_0[F] * R_{N,n}[F]`` with the integer data carried by ``exc``."""
    F = F or shift_thermo(model, exc)
    q = model.q
    x, w = model.nodes, model.weights
    nu = lambda z: np.asarray(F(z), dtype=complex)
    nup = lambda z: np.asarray(F.derivative(z), dtype=complex)
    nu_p, nu_m = complex(nu(q)), complex(nu(-q))
    k_p = kappa(nu, q, x, w, nup)
    k_m = kappa(nu, -q, x, w, nup)
    xi_p = float(model.counting_prime(q).real)
    logv = complex(np.log(2 * q / (2 * np.pi)))
    logv += nu_m * np.log(k_m) - (nu_p + 2) * np.log(k_p)
    if exc.n:
        lam_top = excited_rapidity(model, F, N, L)
        for mp, mh in zip(exc.particles, exc.holes):
            logv += 2 * np.log(complex((lam_top - mp) / (lam_top - mh)))
    logv += 2 * log_barnes_g(1 - nu_m) + 2 * log_barnes_g(2 + nu_p)
    logv -= (nu_p - nu_m) * np.log(2 * np.pi)
    logv -= ((nu_p + 1) ** 2 + nu_m ** 2) * np.log(2 * q * L * xi_p)
    # (1/2) int int (nu'(l) nu(m) - nu'(m) nu(l)) / (l - m); offset grids avoid l = m
    x2, w2 = gauss_legendre(q, x.size + 1)
    a = nup(x) * w
    b = nu(x) * w
    A = nu(x2) * w2
    B = nup(x2) * w2
    inv = 1.0 / (x[:, None] - x2[None, :])
    logv += 0.5 * (a @ inv @ A - b @ inv @ B)
    logv += _log_r_factor(model, exc, N, nu, nup)
    val = complex(np.exp(logv))
    if abs(val.imag) > IMAG_TOL * abs(val):
        raise NumericalContractError(f"discrete part has imaginary residue {val.imag:.3e}")
    return float(val.real)


def _log_r_factor(model: ThermoModel, exc: ExcitationThermo, N: int, nu, nup) -> complex:
    n = exc.n
    if n == 0:
        return 0j
    if exc.particle_ints is None or exc.hole_ints is None:
        raise InputError("the discrete part needs the particle/hole integers")
    mps, mhs = exc.particles, exc.holes
    # integers are matched to rapidities in sorted order
    pis = sorted(exc.particle_ints)
    his = sorted(exc.hole_ints)
    vp = lambda a, b: varphi_p(model, a, b)
    out = 0j
    for mp, mh in zip(mps, mhs):
        out += np.log(complex(vp(mh, mh) * vp(mp, mp) / (vp(mp, mh) * vp(mh, mp))))
        out += aleph(nu, mp, model, nup) - aleph(nu, mh, model, nup)
    for a in range(n):
        for b in range(a + 1, n):
            out += 2 * np.log(vp(mps[a], mps[b])) + 2 * np.log(vp(mhs[a], mhs[b]))
    for a in range(n):
        for b in range(n):
            if a != b:
                out -= 2 * np.log(vp(mps[a], mhs[b]))
    out += 2 * np.log(complex(cauchy_det_real(his, pis)))
    for mp, mh, pa, ha in zip(mps, mhs, pis, his):
        nh = complex(nu(mh))
        npart = complex(nu(mp))
        s = complex(np.sin(np.pi * nh))
        if s == 0:
            return complex(-np.inf)  # F(mu_h) is an integer: the form factor vanishes
        out += 2 * np.log(s / np.pi)
        g = log_pochhammer_ratio(pa, npart, N + 1)
        g += log_gamma_checked(N + 2 - ha - nh) - log_gamma_checked(N + 2 - ha)
        g += log_gamma_checked(ha + nh) - log_gamma_checked(ha)
        out += 2 * g
    return out


@dataclass
class AsymptoticFFResult:
    smooth: float
    discrete: float
    total: float
    diagnostics: dict = field(default_factory=dict)


def asymptotic_ff(model: ThermoModel, exc: ExcitationThermo, N: int, L: float,
                  half_height: Optional[float] = None, n_nodes: int = ct.DEFAULT_CONTOUR_NODES) -> AsymptoticFFResult:
    F = shift_thermo(model, exc)
    sp = smooth_part(model, exc, F, half_height, n_nodes)
    dp = discrete_part(model, exc, N, L, F)
    diag = {
        "contour": sp.contour_report.__dict__,
        "fredholm_nodes": [sp.nodes, sp.refined_nodes],
        "node_doubling_change": sp.node_doubling_change,
        "det_U": sp.det_U,
        "interval_det": sp.interval_det,
    }
    return AsymptoticFFResult(sp.value, dp, sp.value * dp, diag)


# -- regularised determinant -------------------------------------------------------------
@dataclass
class RegularizedDetResult:
    value: complex
    barnes: complex
    hole_product: complex
    det: complex
    zeros_excised: List[complex]
    cut_sagitta: float
    node_doubling_change: float


def regularized_det(nu: Callable, h: Callable, beta: complex, gamma: complex, exc: ExcitationThermo, model: ThermoModel,
                    half_height: Optional[float] = None, n_nodes: int = ct.DEFAULT_CONTOUR_NODES,
                    check_nodes: bool = True) -> RegularizedDetResult:
    """``G(1 - g nu_b(-q)) G(2 + g nu_b(q)) prod(exp(-2i pi g nu_b(mu_h)) - 1) det(I + g U[g nu_b])``
    with ``nu_b = nu + i beta h`` and ``g = gamma``."""
    beta, gamma = complex(beta), complex(gamma)
    q, c = model.q, model.c
    exc.validate(q)

    def nub(z):
        return np.asarray(nu(z), dtype=complex) + 1j * beta * np.asarray(h(z), dtype=complex)

    f = lambda z: gamma * nub(z)
    barnes = barnes_g(1 - complex(f(-q))) * barnes_g(2 + complex(f(q)))
    holes = complex(np.prod([np.expm1(-2j * np.pi * complex(f(mh))) for mh in exc.holes])) if exc.n else 1.0 + 0j
    if gamma == 0:
        g = lambda z: -2j * np.pi * nub(z)  # zero set of the gamma -> 0 limit of the denominator
    else:
        g = _exp_minus_one(f)
    adm = admissible_contour(g, q, c, exc, half_height, n_nodes)
    kern = KernelU(nub, exc, q, c, gamma, adm.cut)
    res = ct.fredholm_det_contour(kern, adm.contour, check=check_nodes)
    return RegularizedDetResult(barnes * holes * res.value, barnes, holes, res.value, adm.excised,
                                adm.cut.sagitta, res.relative_change)
