"""Barnes G, Gamma-function ratios and the auxiliary functionals of the
discrete part (``kappa``, ``aleph``, ``varphi``)."""

from __future__ import annotations

import numpy as np
from scipy.special import bernoulli, loggamma, zeta

from .errors import BarnesRange, RangeViolation

ZETA_PRIME_M1 = -0.16542114370045092  # zeta'(-1) = 1/12 - ln(Glaisher)
_ASYMPTOTIC_TERMS = 12
_B = bernoulli(2 * _ASYMPTOTIC_TERMS + 2)
_SHIFT_TARGET = 14.0
_TAYLOR_TERMS = 120
_ZETA = zeta(np.arange(2, _TAYLOR_TERMS + 2))
EULER_GAMMA = 0.57721566490153286


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == np.floor(z.real)


def _log_g_taylor(s: complex) -> complex:
    """``log G(1 + s)`` from its Maclaurin series (``|s| < 1``)."""
    k = np.arange(2, _TAYLOR_TERMS + 2)
    series = np.sum((-1.0) ** k * _ZETA * s ** (k + 1) / (k + 1))
    return complex(0.5 * s * np.log(2 * np.pi) - 0.5 * (s + (1 + EULER_GAMMA) * s * s) + series)


def log_barnes_g(z) -> complex:
    """``log G(z)`` for ``Re z > -10`` (some branch; ``exp`` is exact).

    Near the real axis the argument is moved into ``[0.5, 1.5)`` by the
    functional equation and the Maclaurin series is used; elsewhere the
    large-argument expansion after an upward shift.  Raises ``BarnesRange``
    at the zeros ``z = 0, -1, -2, ...``; :func:`barnes_g` returns zero there.
    """
    z = complex(z)
    if not np.isfinite(z.real) or not np.isfinite(z.imag) or z.real <= -10:
        raise BarnesRange(f"Barnes G implemented for Re z > -10, got {z}")
    if _is_nonpositive_integer(z):
        raise BarnesRange(f"G vanishes at {z}")
    if z.imag == 0 and z.real == np.floor(z.real) and z.real <= 171:
        # G(n) = prod_{k<n-1} k!
        return complex(sum(loggamma(float(k + 1)) for k in range(1, int(z.real) - 1)))
    if abs(z.imag) <= 0.5 and z.real < _SHIFT_TARGET:
        k = int(np.floor(z.real - 0.5))
        base = z - k
        val = _log_g_taylor(base - 1.0)
        # G(base + j + 1) = Gamma(base + j) G(base + j)
        if k > 0:
            val += sum(complex(loggamma(base + j)) for j in range(k))
        else:
            val -= sum(complex(loggamma(base - j)) for j in range(1, -k + 1))
        return val
    # log G(z) = log G(z + n) - sum_{k<n} log Gamma(z + k)
    n = max(0, int(np.ceil(_SHIFT_TARGET - z.real)))
    shift = sum(complex(loggamma(z + k)) for k in range(n))
    w = z + n - 1.0  # asymptotic series is for log G(w + 1)
    lw = np.log(w)
    val = 0.5 * w * w * lw - 0.75 * w * w + 0.5 * w * np.log(2 * np.pi) - lw / 12.0 + ZETA_PRIME_M1
    w2 = w * w
    wp = w2
    for k in range(1, _ASYMPTOTIC_TERMS + 1):
        val += _B[2 * k + 2] / (4.0 * k * (k + 1) * wp)
        wp *= w2
    return complex(val - shift)


def barnes_g(z) -> complex:
    z = complex(z)
    if z.real > -10 and _is_nonpositive_integer(z):
        return 0j
    val = complex(np.exp(log_barnes_g(z)))
    return complex(val.real) if z.imag == 0 else val


def log_gamma_checked(z) -> complex:
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise RangeViolation(f"Gamma argument {z} is a pole")
    return complex(loggamma(z))


def log_pochhammer_ratio(p: int, nu: complex, count: int) -> complex:
    """``log[Gamma(p) Gamma(p - count + nu) / (Gamma(p - count) Gamma(p + nu))]``.

    Evaluated as ``sum_j log((p - j) / (p + nu - j))`` for ``j = 1..count``,
    which stays finite when ``p`` itself is a nonpositive integer.
    """
    j = np.arange(1, count + 1)
    den = p + nu - j
    if np.any(den == 0):
        raise RangeViolation(f"Gamma ratio singular for p={p}, nu={nu}")
    num = p - j
    if np.any(num == 0):
        return complex(-np.inf)
    return complex(np.sum(np.log(num.astype(complex)) - np.log(den.astype(complex))))


def cauchy_det_real(x, y) -> float:
    """``det[1/(x_a - y_b)]`` via its product formula."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    num = 1.0
    for a in range(n):
        for b in range(a + 1, n):
            num *= (x[b] - x[a]) * (y[a] - y[b])
    return num / np.prod(x[:, None] - y[None, :]) if n else 1.0


def difference_quotient_integral(f, lam, nodes, weights, fprime=None):
    """``int (f(lam) - f(mu)) / (lam - mu) dmu`` on the quadrature grid.

    If ``lam`` coincides with a node, that node uses ``f'(lam)`` (required then).
    """
    lam = complex(lam)
    d = lam - nodes
    fl = f(lam)
    fm = f(nodes)
    close = np.abs(d) < 1e-12 * max(1.0, abs(lam))
    q = np.empty(nodes.size, dtype=complex)
    q[~close] = (fl - fm[~close]) / d[~close]
    if np.any(close):
        if fprime is None:
            raise RangeViolation("evaluation point sits on a quadrature node; pass fprime")
        q[close] = fprime(lam)
    return complex(np.sum(weights * q))


def kappa(nu, lam, nodes, weights, nu_prime=None) -> complex:
    """``kappa[nu](lam) = exp(-int (nu(lam) - nu(mu)) / (lam - mu) dmu)``."""
    return complex(np.exp(-difference_quotient_integral(nu, lam, nodes, weights, nu_prime)))


def varphi_p(model, lam, mu) -> complex:
    """``2 pi (lam - mu) / (p(lam) - p(mu))`` with the diagonal ``2 pi / p'(lam)``."""
    lam, mu = complex(lam), complex(mu)
    if abs(lam - mu) < 1e-10 * max(1.0, abs(lam)):
        return complex(2 * np.pi / model.p_prime_at(0.5 * (lam + mu)))
    return complex(2 * np.pi * (lam - mu) / (model.p(lam) - model.p(mu)))


def aleph(nu, omega, model, nu_prime=None) -> complex:
    """``2 nu(w) ln(varphi(w, q) / varphi(w, -q)) + 2 int (nu(l) - nu(w)) / (l - w) dl``."""
    q = model.q
    ratio = varphi_p(model, omega, q) / varphi_p(model, omega, -q)
    dq = difference_quotient_integral(nu, omega, model.nodes, model.weights, nu_prime)
    return complex(2 * nu(omega) * np.log(ratio) + 2 * dq)
