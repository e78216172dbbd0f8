"""Model constants, scattering phase, Bethe equations and counting functions.

Conventions: the scattering phase is ``theta(x) = 2 arctan(x / c)`` and its
derivative ``K(x) = 2c / (x**2 + c**2)``.  A state with ``n`` roots and
quantum numbers ``ell`` solves

    drive(mu_r) + sum_p theta(mu_r - mu_p) = 2 pi (ell_r - (n + 1) / 2)

with ``drive(x) = L x`` in the continuum and ``drive(x) = -i ln(d/a)(x)`` on
the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateQuantumNumbers,
    DeltaTooLarge,
    GeometryMismatch,
    InputError,
    NonConvergence,
    RegimeMismatch,
)

CONTINUUM = "continuum"
LATTICE = "lattice"

SOLVER_TOL = 1e-12
SOLVER_MAXITER = 200
# single-site logarithms stay on the principal branch while |x delta / 2| < this
DELTA_ACCEPT = 0.5


@dataclass(frozen=True)
class ModelGeometry:
    """Coupling ``c``, volume ``L`` and, for the lattice model, spacing and sites.

    Build lattice geometries with :meth:`lattice`; ``M`` is always even and
    ``delta * M == L`` to one part in 1e9.
    """

    c: float
    L: float
    delta: Optional[float] = None
    M: Optional[int] = None

    def __post_init__(self):
        if not (self.c > 0 and np.isfinite(self.c)):
            raise InputError(f"coupling c must be positive, got {self.c}")
        if not (self.L > 0 and np.isfinite(self.L)):
            raise InputError(f"volume L must be positive, got {self.L}")
        if (self.delta is None) != (self.M is None):
            raise InputError("lattice geometry needs both delta and M")
        if self.delta is not None:
            if self.delta <= 0:
                raise InputError(f"lattice spacing must be positive, got {self.delta}")
            if self.M <= 0 or self.M % 2:
                raise InputError(f"number of sites must be even and positive, got {self.M}")
            if abs(self.delta * self.M - self.L) > 1e-9 * self.L:
                raise InputError(
                    f"delta*M = {self.delta * self.M!r} does not match L = {self.L!r}"
                )

    @classmethod
    def continuum(cls, c: float, L: float) -> "ModelGeometry":
        return cls(float(c), float(L))

    @classmethod
    def lattice(cls, c: float, L: float, delta: float = None, M: int = None) -> "ModelGeometry":
        """Lattice geometry from either the spacing or the (even) site count."""
        if (delta is None) == (M is None):
            raise InputError("give exactly one of delta, M")
        if M is None:
            M = 2 * int(round(L / delta / 2.0))
            if M <= 0:
                raise InputError(f"delta={delta} too large for L={L}")
            if abs(M * delta - L) > 1e-9 * L:
                raise InputError(f"L/delta = {L / delta!r} is not an even integer")
        else:
            M = int(M)
            delta = L / M
        return cls(float(c), float(L), float(delta), M)

    @property
    def regime(self) -> str:
        return CONTINUUM if self.delta is None else LATTICE

    @property
    def is_lattice(self) -> bool:
        return self.delta is not None

    @property
    def nu(self) -> complex:
        """Lattice point ``-2i/delta + ic/2`` where the Lax matrix degenerates."""
        if not self.is_lattice:
            raise RegimeMismatch("nu is only defined on the lattice")
        return complex(0.0, -2.0 / self.delta + self.c / 2.0)

    def with_delta(self, delta: float) -> "ModelGeometry":
        return ModelGeometry.lattice(self.c, self.L, delta=delta)

    def as_continuum(self) -> "ModelGeometry":
        return ModelGeometry.continuum(self.c, self.L)


def theta_kernel(lam, c: float):
    """Return ``(theta(lam), K(lam))``.

    Real input uses ``2 arctan(lam / c)``; complex input uses the
    principal-branch form ``i ln((ic + lam) / (ic - lam))``, which coincides
    with it on the strip ``|Im lam| < c``.
    """
    lam = np.asarray(lam)
    if np.iscomplexobj(lam):
        th = 1j * np.log((1j * c + lam) / (1j * c - lam))
    else:
        th = 2.0 * np.arctan(lam / c)
    K = 2.0 * c / (lam * lam + c * c)
    if th.ndim == 0:
        return th[()], K[()]
    return th, K


def theta(lam, c: float):
    return theta_kernel(lam, c)[0]


def kernel(lam, c: float):
    lam = np.asarray(lam)
    return 2.0 * c / (lam * lam + c * c)


def kernel_prime(lam, c: float):
    lam = np.asarray(lam)
    return -4.0 * c * lam / (lam * lam + c * c) ** 2


def log_ad(lam, geometry: ModelGeometry):
    """Logarithms of the vacuum eigenvalues ``a(lam)``, ``d(lam)``.

    On the lattice these are ``M/2`` times a sum of two principal-branch
    single-site logarithms; the exponentials are exact powers because ``M/2``
    is an integer.
    """
    lam = np.asarray(lam, dtype=complex)
    if not geometry.is_lattice:
        return -0.5j * lam * geometry.L, 0.5j * lam * geometry.L
    x = 0.5j * lam * geometry.delta
    y = geometry.c * geometry.delta / 4.0
    half = geometry.M // 2
    with np.errstate(divide="ignore", invalid="ignore"):
        # a(nu) = 0 exactly: log gives -inf, exp restores the zero
        la = half * (np.log(1.0 - x + y) + np.log(1.0 - x - y))
    ld = half * (np.log(1.0 + x + y) + np.log(1.0 + x - y))
    return la, ld


def lattice_ad(lam, geometry: ModelGeometry):
    """``(a(lam), d(lam))``; the continuum limits ``exp(-+ i lam L / 2)`` off-lattice."""
    la, ld = log_ad(lam, geometry)
    return np.exp(la), np.exp(ld)


def drive(lam, geometry: ModelGeometry):
    """Driving term of the logarithmic Bethe equations for real ``lam``."""
    lam = np.asarray(lam, dtype=float)
    if not geometry.is_lattice:
        return geometry.L * lam
    h = 0.5 * lam * geometry.delta
    y = geometry.c * geometry.delta / 4.0
    return geometry.M * (np.arctan(h / (1.0 + y)) + np.arctan(h / (1.0 - y)))


def drive_prime(lam, geometry: ModelGeometry):
    lam = np.asarray(lam, dtype=float)
    if not geometry.is_lattice:
        return np.full_like(lam, geometry.L)
    h = 0.5 * lam * geometry.delta
    y = geometry.c * geometry.delta / 4.0
    out = 0.0
    for u in (1.0 + y, 1.0 - y):
        out = out + (0.5 * geometry.delta / u) / (1.0 + (h / u) ** 2)
    return geometry.M * out


def drive_complex(lam, geometry: ModelGeometry):
    """``-i ln(d/a)`` continued to complex arguments."""
    la, ld = log_ad(lam, geometry)
    return -1j * (ld - la)


@dataclass(frozen=True)
class QuantumNumbers:
    ells: tuple

    def __post_init__(self):
        ells = tuple(int(e) for e in self.ells)
        if any(b <= a for a, b in zip(ells, ells[1:])):
            raise DegenerateQuantumNumbers(f"quantum numbers must strictly increase: {ells}")
        object.__setattr__(self, "ells", ells)

    def __len__(self):
        return len(self.ells)

    @classmethod
    def ground(cls, n: int) -> "QuantumNumbers":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def particle_hole(cls, n: int, holes: Sequence[int], particles: Sequence[int]) -> "QuantumNumbers":
        """Ground-state integers 1..n with ``ell_{h_a}`` replaced by ``p_a``."""
        if len(holes) != len(particles):
            raise InputError("need as many particles as holes")
        ells = list(range(1, n + 1))
        for h, p in zip(holes, particles):
            if not 1 <= h <= n:
                raise InputError(f"hole {h} outside 1..{n}")
            if 1 <= p <= n:
                raise InputError(f"particle {p} inside 1..{n}")
            ells[h - 1] = p
        return cls(tuple(sorted(ells)))

    def parity_partner(self) -> "QuantumNumbers":
        n = len(self.ells)
        return QuantumNumbers(tuple(n + 1 - e for e in reversed(self.ells)))


@dataclass(frozen=True)
class BetheState:
    geometry: ModelGeometry
    qn: QuantumNumbers
    roots: np.ndarray = field(repr=False)
    residual: float = 0.0
    iterations: int = 0

    @property
    def n(self) -> int:
        return len(self.qn)

    def __len__(self):
        return self.n


def free_roots(qn: QuantumNumbers, L: float) -> np.ndarray:
    n = len(qn)
    return 2.0 * np.pi * (np.asarray(qn.ells, dtype=float) - (n + 1) / 2.0) / L


def bae_defect(roots, qn: QuantumNumbers, geometry: ModelGeometry) -> np.ndarray:
    """Defect of the logarithmic Bethe equations at ``roots``."""
    roots = np.asarray(roots, dtype=float)
    n = roots.size
    th = theta(roots[:, None] - roots[None, :], geometry.c)
    rhs = 2.0 * np.pi * (np.asarray(qn.ells, dtype=float) - (n + 1) / 2.0)
    return drive(roots, geometry) + th.sum(axis=1) - rhs


def _jacobian(roots, geometry):
    K = kernel(roots[:, None] - roots[None, :], geometry.c)
    J = -K
    J[np.diag_indices_from(J)] = drive_prime(roots, geometry) + K.sum(axis=1) - np.diag(K)
    return J


def solve_bae(
    qn: QuantumNumbers | Sequence[int],
    geometry: ModelGeometry,
    tol: float = SOLVER_TOL,
    maxiter: int = SOLVER_MAXITER,
    guess=None,
) -> BetheState:
    """Solve the logarithmic Bethe equations by damped Newton iteration.

    The Jacobian is the Hessian of the (strictly convex) Yang-Yang action, so
    the undamped step almost always succeeds; steps are halved until the
    defect norm decreases.
    """
    if not isinstance(qn, QuantumNumbers):
        qn = QuantumNumbers(tuple(qn))
    n = len(qn)
    if n == 0:
        return BetheState(geometry, qn, np.zeros(0), 0.0, 0)
    x = free_roots(qn, geometry.L) if guess is None else np.array(guess, dtype=float)
    if geometry.is_lattice and np.max(np.abs(x)) * geometry.delta / 2.0 > DELTA_ACCEPT:
        raise DeltaTooLarge(
            f"|lambda delta/2| = {np.max(np.abs(x)) * geometry.delta / 2:.3g} exceeds {DELTA_ACCEPT}"
        )
    R = bae_defect(x, qn, geometry)
    res = np.max(np.abs(R))
    it = 0
    stalled = 0
    while it < maxiter:
        if res <= tol:
            # one polishing step; keep it only if it does not hurt
            step = np.linalg.solve(_jacobian(x, geometry), R)
            x_new = x - step
            R_new = bae_defect(x_new, qn, geometry)
            if np.max(np.abs(R_new)) <= res:
                x, R, res = x_new, R_new, np.max(np.abs(R_new))
            break
        it += 1
        step = np.linalg.solve(_jacobian(x, geometry), R)
        t = 1.0
        norm0 = np.linalg.norm(R)
        for _ in range(60):
            x_new = x - t * step
            R_new = bae_defect(x_new, qn, geometry)
            if np.linalg.norm(R_new) < norm0:
                break
            t *= 0.5
        else:
            stalled += 1
            if stalled > 2:
                break
            continue
        x, R = x_new, R_new
        res = np.max(np.abs(R))
    if not res <= tol:
        raise NonConvergence(f"Bethe equations not solved: residual {res:.3e} after {it} iterations")
    if n > 1 and np.min(np.diff(x)) <= 0:
        raise NonConvergence("roots are not strictly increasing")
    return BetheState(geometry, qn, x, float(res), it)


class CountingFunction:
    """Counting function of a solved state, normalised so that it equals
    ``ell_a / L`` at the root ``mu_a``."""

    def __init__(self, state: BetheState):
        self.state = state
        self.geometry = state.geometry
        self.roots = np.asarray(state.roots)

    def __call__(self, w):
        g = self.geometry
        w = np.asarray(w)
        th = theta(w[..., None] - self.roots, g.c).sum(axis=-1)
        dr = drive_complex(w, g) if np.iscomplexobj(w) else drive(w, g)
        return (dr + th) / (2 * np.pi * g.L) + (self.state.n + 1) / (2.0 * g.L)

    def derivative(self, w):
        g = self.geometry
        w = np.asarray(w)
        Ks = kernel(w[..., None] - self.roots, g.c).sum(axis=-1)
        return (drive_prime(w, g) + Ks) / (2 * np.pi * g.L)


def counting_functions(state: BetheState):
    """Return ``(xi, xi_prime)`` callables for ``state``."""
    cf = CountingFunction(state)
    return cf, cf.derivative


def _check_same_geometry(a: BetheState, b: BetheState):
    if a.geometry != b.geometry:
        raise GeometryMismatch(f"states live in different geometries: {a.geometry} vs {b.geometry}")


class ShiftFunction:
    """Finite-size shift function between an ``N+1``-root state ``mu`` and an
    ``N``-root state ``lam``: ``F(w) = L [xi_lam(w) - xi_mu(w)]``."""

    def __init__(self, mu_roots, lam_roots, c: float):
        self.mu = np.asarray(mu_roots, dtype=float)
        self.lam = np.asarray(lam_roots, dtype=float)
        self.c = c

    def __call__(self, w):
        w = np.asarray(w)
        s = theta(w[..., None] - self.lam, self.c).sum(axis=-1)
        s = s - theta(w[..., None] - self.mu, self.c).sum(axis=-1)
        return s / (2 * np.pi) + 0.5 * (self.lam.size - self.mu.size)

    def exp_product(self, w):
        """``exp(-2 i pi F(w))`` from the rational product form."""
        w = np.asarray(w, dtype=complex)
        c = self.c
        out = np.prod((self.mu - w[..., None] + 1j * c) / (self.mu - w[..., None] - 1j * c), axis=-1)
        out = out * np.prod((self.lam - w[..., None] - 1j * c) / (self.lam - w[..., None] + 1j * c), axis=-1)
        return out

    def exp_direct(self, w):
        return np.exp(-2j * np.pi * self(w))


def shift_function_finite(mu_state: BetheState, lam_state: BetheState) -> ShiftFunction:
    _check_same_geometry(mu_state, lam_state)
    if mu_state.n != lam_state.n + 1:
        raise InputError(f"need N+1 and N roots, got {mu_state.n} and {lam_state.n}")
    return ShiftFunction(mu_state.roots, lam_state.roots, mu_state.geometry.c)
