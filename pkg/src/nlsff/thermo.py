"""Dressed quantities on the Fermi interval ``[-q, q]``.

All linear integral equations share the Nystrom matrix
``I - K/(2 pi) diag(w)`` on Gauss-Legendre nodes; its LU factors are computed
once per model and reused for every right-hand side.  Off-grid values use the
natural Nystrom extension, which also works for complex arguments inside the
strip ``|Im lam| < c``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .bethe_core import kernel, kernel_prime, theta
from .errors import (
    BracketingFailure,
    InputError,
    NonConvergence,
    OutOfRange,
    SingularNystrom,
    StripViolation,
)

DEFAULT_NODES = 64
SERIAL_VERSION = 1
TWO_PI = 2.0 * np.pi


def gauss_legendre(q: float, m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return q * x, q * w


def _check_strip(lam, c):
    if np.any(np.abs(np.imag(lam)) >= c):
        raise StripViolation(f"|Im lambda| must stay below c={c}")


@dataclass(frozen=True, eq=False)
class ThermoModel:
    """Solved dressed charge and momentum derivative for given ``(c, q)``."""

    c: float
    q: float
    nodes: np.ndarray
    weights: np.ndarray
    p_prime: np.ndarray
    Z: np.ndarray
    _lu: tuple = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return self.nodes.size

    @property
    def density(self) -> float:
        """``D = p(q) / pi``."""
        return float(self.p(self.q).real) / np.pi

    # -- linear solves -----------------------------------------------------
    def solve(self, rhs):
        """Solve ``f - (1/2pi) int K f = rhs`` on the grid."""
        return lu_solve(self._lu, np.asarray(rhs, dtype=float))

    def extend(self, lam, values, rhs_at):
        """Nystrom extension ``rhs(lam) + (1/2pi) sum K(lam - x_j) w_j f_j``."""
        lam = np.asarray(lam)
        _check_strip(lam, self.c)
        K = kernel(lam[..., None] - self.nodes, self.c)
        return rhs_at(lam) + K @ (self.weights * values) / TWO_PI

    def extend_prime(self, lam, values, rhs_prime_at):
        lam = np.asarray(lam)
        _check_strip(lam, self.c)
        Kp = kernel_prime(lam[..., None] - self.nodes, self.c)
        return rhs_prime_at(lam) + Kp @ (self.weights * values) / TWO_PI

    # -- dressed charge and momentum -----------------------------------------
    def dressed_charge(self, lam):
        return self.extend(lam, self.Z, lambda x: np.ones(np.shape(x)))

    def dressed_charge_prime(self, lam):
        return self.extend_prime(lam, self.Z, lambda x: np.zeros(np.shape(x)))

    def p(self, lam):
        """Dressed momentum ``lam + (1/2pi) int theta(lam - mu) p'(mu) dmu``."""
        lam = np.asarray(lam)
        _check_strip(lam, self.c)
        th = theta(lam[..., None] - self.nodes, self.c)
        return lam + th @ (self.weights * self.p_prime) / TWO_PI

    def p_prime_at(self, lam):
        return self.extend(lam, self.p_prime, lambda x: np.ones(np.shape(x)))

    def fredholm_det(self) -> float:
        """``det(I - K/2pi)`` on ``[-q, q]`` from the cached LU factors."""
        lu, piv = self._lu
        return float(np.prod(np.diag(lu)) * _perm_sign(piv))

    # -- counting function ---------------------------------------------------
    def counting(self, lam):
        """``xi = p / 2pi + D / 2``; ``xi(q) = D``."""
        return self.p(lam) / TWO_PI + 0.5 * self.density

    def counting_prime(self, lam):
        return self.p_prime_at(lam) / TWO_PI

    # -- serialization -------------------------------------------------------
    def to_json(self) -> str:
        fmt = lambda a: ["%.17g" % v for v in np.asarray(a, dtype=float).ravel()]
        record = {
            "version": SERIAL_VERSION,
            "c": "%.17g" % self.c,
            "q": "%.17g" % self.q,
            "m": self.m,
            "nodes": fmt(self.nodes),
            "weights": fmt(self.weights),
            "p_prime": fmt(self.p_prime),
            "Z": fmt(self.Z),
        }
        return json.dumps(record, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ThermoModel":
        rec = json.loads(text)
        if rec.get("version") != SERIAL_VERSION:
            raise ValueError(f"unsupported thermo record version {rec.get('version')!r}")
        arr = lambda k: np.array([float(v) for v in rec[k]])
        c, q = float(rec["c"]), float(rec["q"])
        nodes, weights = arr("nodes"), arr("weights")
        if not (nodes.size == weights.size == len(rec["Z"]) == len(rec["p_prime"]) == int(rec["m"])):
            raise ValueError("inconsistent array lengths in thermo record")
        return cls(c, q, nodes, weights, arr("p_prime"), arr("Z"), _nystrom_lu(nodes, weights, c))


def _perm_sign(piv) -> float:
    return -1.0 if np.sum(piv != np.arange(piv.size)) % 2 else 1.0


def _nystrom_matrix(nodes, weights, c):
    return np.eye(nodes.size) - kernel(nodes[:, None] - nodes[None, :], c) * weights[None, :] / TWO_PI


def _nystrom_lu(nodes, weights, c):
    A = _nystrom_matrix(nodes, weights, c)
    lu = lu_factor(A, check_finite=True)
    if np.min(np.abs(np.diag(lu[0]))) < 1e-14:
        raise SingularNystrom("Nystrom matrix is numerically singular")
    return lu


def solve_dressed(c: float, q: float, m: int = DEFAULT_NODES) -> ThermoModel:
    """Dressed charge and ``p'`` on ``[-q, q]`` with ``m`` Gauss-Legendre nodes.

    ``Z`` comes from its own integral equation; ``p'`` is obtained separately
    by solving the integrated-by-parts equation for ``p`` itself and
    differentiating, so the two agree only if both solves are accurate.
    """
    if not c > 0 or not q > 0:
        raise InputError(f"need c > 0 and q > 0, got c={c}, q={q}")
    if m < 8:
        raise InputError(f"need at least 8 nodes, got {m}")
    x, w = gauss_legendre(q, m)
    lu = _nystrom_lu(x, w, c)
    Z = lu_solve(lu, np.ones(m))
    pp = _p_prime_by_parts(x, w, c, q)
    return ThermoModel(float(c), float(q), x, w, pp, Z, lu)


def _p_prime_by_parts(x, w, c, q):
    """``p'`` on the grid via the equation for ``p`` with boundary terms.

    With ``P = p(q)`` and odd ``p``:
    ``p(l) - (1/2pi) int K(l-m) p(m) dm - P (theta(l-q) + theta(l+q)) / 2pi = l``.
    Unknowns are the grid values of ``p`` and ``P``.
    """
    m = x.size
    A = np.zeros((m + 1, m + 1))
    rows = np.append(x, q)
    A[:, :m] = -kernel(rows[:, None] - x[None, :], c) * w[None, :] / TWO_PI
    A[np.arange(m), np.arange(m)] += 1.0
    A[m, m] = 1.0
    A[:, m] -= (theta(rows - q, c) + theta(rows + q, c)) / TWO_PI
    sol = np.linalg.solve(A, rows)
    p_grid, P = sol[:m], sol[m]
    Kp = kernel_prime(x[:, None] - x[None, :], c)
    return 1.0 + Kp @ (w * p_grid) / TWO_PI + P * (kernel(x - q, c) + kernel(x + q, c)) / TWO_PI


def find_q(c: float, D: float, m: int = DEFAULT_NODES, tol: float = 1e-12, maxiter: int = 100) -> float:
    """Fermi boundary from ``p(q) = pi D`` by secant iteration on re-solved models."""
    if not D > 0:
        raise InputError(f"density must be positive, got {D}")
    target = np.pi * D

    def g(q):
        return float(solve_dressed(c, q, m).p(q).real) - target

    lo, hi = 1e-6 * D, 1e3 * D
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise BracketingFailure(f"p(q) - pi D has no sign change on [{lo}, {hi}]")
    q0 = min(max(target, lo), hi)
    q1 = 0.9 * q0
    g0, g1 = g(q0), g(q1)
    for _ in range(maxiter):
        if g1 == g0:
            break
        q2 = q1 - g1 * (q1 - q0) / (g1 - g0)
        if not lo < q2 < hi:
            break
        q0, g0, q1 = q1, g1, q2
        g1 = g(q1)
        if abs(g1) < tol * max(1.0, target):
            return q1
    # secant left the bracket or stalled: fall back to bisection
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) < tol * max(1.0, target) or hi - lo < 1e-15 * hi:
            return mid
        if gm * glo > 0:
            lo, glo = mid, gm
        else:
            hi = mid
    raise NonConvergence("find_q did not converge")


class DressedPhase:
    """``phi(., mu0)`` solved on the grid and extended off it."""

    def __init__(self, model: ThermoModel, mu0: float):
        self.model = model
        self.mu0 = float(mu0)
        c = model.c
        self.values = model.solve(theta(model.nodes - self.mu0, c) / TWO_PI)

    def __call__(self, lam):
        c, mu0 = self.model.c, self.mu0
        return self.model.extend(lam, self.values, lambda x: theta(x - mu0, c) / TWO_PI)

    def derivative(self, lam):
        c, mu0 = self.model.c, self.mu0
        return self.model.extend_prime(lam, self.values, lambda x: kernel(x - mu0, c) / TWO_PI)


def dressed_phase_at(model: ThermoModel, lam, mu0: float):
    return DressedPhase(model, mu0)(lam)


@dataclass(frozen=True)
class ExcitationThermo:
    """Particle and hole rapidities in the thermodynamic limit."""

    particles: tuple = ()
    holes: tuple = ()
    particle_ints: Optional[tuple] = None
    hole_ints: Optional[tuple] = None
    L: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(sorted(float(p) for p in self.particles)))
        object.__setattr__(self, "holes", tuple(sorted(float(h) for h in self.holes)))
        if len(self.particles) != len(self.holes):
            raise InputError("need as many particles as holes")

    @property
    def n(self) -> int:
        return len(self.particles)

    def validate(self, q: float):
        if any(abs(p) <= q for p in self.particles):
            raise InputError(f"particles must lie outside [-{q}, {q}]")
        if any(abs(h) >= q for h in self.holes):
            raise InputError(f"holes must lie inside (-{q}, {q})")
        return self

    @classmethod
    def from_integers(cls, model: ThermoModel, particle_ints: Sequence[int], hole_ints: Sequence[int], L: float):
        """Rapidities from ``xi(mu_p) = p/L`` and ``xi(mu_h) = h/L``."""
        ps = [rapidity_from_integer(model, k, L) for k in particle_ints]
        hs = [rapidity_from_integer(model, k, L) for k in hole_ints]
        return cls(tuple(ps), tuple(hs), tuple(int(k) for k in particle_ints), tuple(int(k) for k in hole_ints), float(L))


class ShiftThermo:
    """Thermodynamic shift function ``F = -Z/2 - phi(., q) - sum[phi(., p) - phi(., h)]``."""

    def __init__(self, model: ThermoModel, exc: ExcitationThermo):
        self.model = model
        self.exc = exc
        self._edge = DressedPhase(model, model.q)
        self._parts = [DressedPhase(model, p) for p in exc.particles]
        self._holes = [DressedPhase(model, h) for h in exc.holes]

    def __call__(self, lam):
        out = -0.5 * self.model.dressed_charge(lam) - self._edge(lam)
        for fp, fh in zip(self._parts, self._holes):
            out = out - fp(lam) + fh(lam)
        return out

    def derivative(self, lam):
        out = -0.5 * self.model.dressed_charge_prime(lam) - self._edge.derivative(lam)
        for fp, fh in zip(self._parts, self._holes):
            out = out - fp.derivative(lam) + fh.derivative(lam)
        return out

    def exp_neg(self, lam):
        """``exp(-2 i pi F(lam))``."""
        return np.exp(-2j * np.pi * self(lam))


def shift_thermo(model: ThermoModel, exc: ExcitationThermo) -> ShiftThermo:
    exc.validate(model.q)
    return ShiftThermo(model, exc)


def solve_increasing(f, fprime, target: float, x0: float = 0.0, tol: float = 1e-12, span: float = 1e6):
    """Root of the strictly increasing ``f(x) = target`` by Newton with a bisection safeguard."""
    lo, hi = x0 - 1.0, x0 + 1.0
    while f(lo) > target:
        lo = x0 - 2.0 * (x0 - lo)
        if x0 - lo > span:
            raise OutOfRange(f"target {target} below the range of the counting function")
    while f(hi) < target:
        hi = x0 + 2.0 * (hi - x0)
        if hi - x0 > span:
            raise OutOfRange(f"target {target} above the range of the counting function")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        r = f(x) - target
        if abs(r) < tol:
            return x
        if r > 0:
            hi = x
        else:
            lo = x
        step = x - r / fprime(x)
        x = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo < 1e-15 * max(1.0, abs(x)):
            return x
    raise NonConvergence(f"monotone solve for target {target} did not converge")


def rapidity_from_integer(model: ThermoModel, k: int, L: float) -> float:
    """``mu`` with ``xi(mu) = k / L``."""
    if not L > 0:
        raise InputError(f"L must be positive, got {L}")
    f = lambda x: float(model.counting(x).real)
    fp = lambda x: float(model.counting_prime(x).real)
    return solve_increasing(f, fp, k / L)
