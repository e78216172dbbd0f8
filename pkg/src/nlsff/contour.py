"""Closed integration contours, winding numbers, argument-principle zero
search and Fredholm determinants of kernels living on contours.

A contour is a union of oriented loops; each loop is a chain of analytic
pieces (segments and circular arcs) integrated with Gauss-Legendre nodes per
piece, which converges geometrically for kernels analytic near the contour.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence, Tuple

import numpy as np

from .errors import ContourInvalid, InputError, NonConvergedNodes

DEFAULT_CONTOUR_NODES = 128
NODE_DOUBLING_TOL = 1e-8
PANEL_ORDER = 16


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def at(self, t):
        return self.a + (self.b - self.a) * t, np.full(np.shape(t), self.b - self.a, dtype=complex)

    @property
    def length(self) -> float:
        return abs(self.b - self.a)


@dataclass(frozen=True)
class Arc:
    """``center + radius * exp(i phi)`` for ``phi`` from ``phi0`` to ``phi1``."""

    center: complex
    radius: float
    phi0: float
    phi1: float

    def at(self, t):
        phi = self.phi0 + (self.phi1 - self.phi0) * np.asarray(t)
        e = np.exp(1j * phi)
        return self.center + self.radius * e, 1j * self.radius * (self.phi1 - self.phi0) * e

    @property
    def length(self) -> float:
        return abs(self.radius * (self.phi1 - self.phi0))


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class ClosedContour:
    """Union of closed, oriented loops.

    Each piece is split into Gauss-Legendre panels no longer than
    ``total_length * PANEL_ORDER / n_nodes`` and no longer than ``grading``
    times their distance to any of the ``singular`` points, so kernels with
    nearby branch points or poles still converge geometrically.
    """

    loops: Tuple[Tuple[object, ...], ...]
    n_nodes: int = DEFAULT_CONTOUR_NODES
    label: str = ""
    refine: int = 1
    singular: Tuple[complex, ...] = ()
    grading: float = 1.0

    def pieces(self):
        return [p for loop in self.loops for p in loop]

    def with_singular(self, points) -> "ClosedContour":
        return replace(self, singular=tuple(complex(z) for z in points))

    def _panels(self, piece, max_len):
        sing = np.asarray(self.singular, dtype=complex)
        out, stack = [], [(0.0, 1.0, 0)]
        while stack:
            a, b, depth = stack.pop()
            length = piece.length * (b - a)
            split = length > max_len
            if not split and sing.size:
                pts = piece.at(np.linspace(a, b, 5))[0]
                d = np.min(np.abs(pts[:, None] - sing[None, :]))
                split = length > self.grading * d
            if split and depth < 40:
                m = 0.5 * (a + b)
                stack.extend([(m, b, depth + 1), (a, m, depth + 1)])
            else:
                out.append((a, b))
        return sorted(out)

    def panels(self):
        pieces = self.pieces()
        total = sum(p.length for p in pieces)
        max_len = total * PANEL_ORDER / self.n_nodes
        return [(piece, self._panels(piece, max_len)) for piece in pieces]

    def quadrature(self):
        """Nodes ``z_k`` and complex weights ``w_k z'(t_k)``."""
        t0, w0 = _gauss01(PANEL_ORDER * self.refine)
        zs, dzs = [], []
        for piece, panels in self.panels():
            for a, b in panels:
                z, dz = piece.at(a + (b - a) * t0)
                zs.append(z)
                dzs.append((b - a) * w0 * dz)
        return np.concatenate(zs), np.concatenate(dzs)

    def doubled(self) -> "ClosedContour":
        return replace(self, refine=2 * self.refine)

    def polyline(self, per_piece: int = 400):
        """Dense samples of each loop, as a list of closed point arrays."""
        out = []
        t = np.linspace(0.0, 1.0, per_piece, endpoint=False)
        for loop in self.loops:
            out.append(np.concatenate([p.at(t)[0] for p in loop]))
        return out

    def winding(self, point: complex) -> int:
        """Winding number of the contour around ``point`` (phase unwrapping)."""
        total = 0.0
        for pts in self.polyline():
            d = pts - point
            if np.min(np.abs(d)) < 1e-12:
                raise ContourInvalid(f"point {point} lies on the contour")
            ang = np.angle(np.append(d, d[0]))
            total += np.sum(np.angle(np.exp(1j * np.diff(ang))))
        return int(round(total / (2 * np.pi)))

    def with_excisions(self, centers: Sequence[complex], radii: Sequence[float]) -> "ClosedContour":
        """Add clockwise circles, removing small discs from the enclosed region."""
        extra = tuple((Arc(complex(z0), float(r), 0.0, -2 * np.pi),) for z0, r in zip(centers, radii))
        return replace(self, loops=self.loops + extra, singular=self.singular + tuple(complex(z) for z in centers))

    def distance(self, point: complex) -> float:
        return float(min(np.min(np.abs(pts - point)) for pts in self.polyline()))


def stadium(reach: float, half_height: float, n_nodes: int = DEFAULT_CONTOUR_NODES, center: complex = 0.0) -> ClosedContour:
    """Counterclockwise stadium: horizontal sides at ``+-h``, semicircular caps,
    extreme real points at ``center +- reach``."""
    h = float(half_height)
    if not 0 < h < reach:
        raise InputError(f"need 0 < half height < reach, got h={h}, reach={reach}")
    a = reach - h
    c = complex(center)
    loop = (
        Segment(c + complex(-a, -h), c + complex(a, -h)),
        Arc(c + a, h, -np.pi / 2, np.pi / 2),
        Segment(c + complex(a, h), c + complex(-a, h)),
        Arc(c - a, h, np.pi / 2, 3 * np.pi / 2),
    )
    return ClosedContour((loop,), n_nodes, label=f"stadium(reach={reach:g}, h={h:g})")


def circle(center: complex, radius: float, n_nodes: int = 64) -> ClosedContour:
    return ClosedContour(((Arc(complex(center), float(radius), 0.0, 2 * np.pi),),), n_nodes, label="circle")


def fredholm_det_matrix(kernel: Callable, z, dz) -> complex:
    A = kernel(z[:, None], z[None, :]) * dz[None, :]
    sign, ld = np.linalg.slogdet(np.eye(z.size) + A)
    return complex(sign * np.exp(ld))


@dataclass
class FredholmResult:
    value: complex
    nodes: int
    refined_nodes: int
    relative_change: float


def fredholm_det_contour(kernel: Callable, contour: ClosedContour, check: bool = True, tol: float = NODE_DOUBLING_TOL):
    """``det(I + A)`` with ``A_jk = kernel(z_j, z_k) w_k z'_k`` on the contour.

    With ``check`` the node budget is doubled and the refined value returned;
    ``NonConvergedNodes`` is raised if the two differ by more than ``tol``.
    """
    z, dz = contour.quadrature()
    val = fredholm_det_matrix(kernel, z, dz)
    if not check:
        return FredholmResult(val, z.size, z.size, float("nan"))
    z2, dz2 = contour.doubled().quadrature()
    val2 = fredholm_det_matrix(kernel, z2, dz2)
    rel = abs(val2 - val) / max(abs(val2), 1e-300)
    if rel > tol:
        raise NonConvergedNodes(f"node doubling {z.size}->{z2.size} changed the determinant by {rel:.2e}")
    return FredholmResult(val2, z.size, z2.size, rel)


# -- argument principle ------------------------------------------------------
def _rect_boundary(x0, x1, y0, y1, n):
    t = np.linspace(0.0, 1.0, n, endpoint=False)
    return np.concatenate([
        x0 + (x1 - x0) * t + 1j * y0,
        x1 + 1j * (y0 + (y1 - y0) * t),
        x1 - (x1 - x0) * t + 1j * y1,
        x0 + 1j * (y1 - (y1 - y0) * t),
    ])


def phase_winding(g: Callable, pts) -> float:
    """Total change of ``arg g`` along the closed polyline ``pts`` over ``2 pi``."""
    vals = g(np.append(pts, pts[0]))
    if np.min(np.abs(vals)) == 0:
        return float("nan")
    steps = np.angle(vals[1:] / vals[:-1])
    if np.max(np.abs(steps)) > np.pi / 3:
        return float("nan")
    return float(np.sum(steps) / (2 * np.pi))


def count_zeros_rect(g, x0, x1, y0, y1, n: int = 64, max_n: int = 1 << 14):
    """Zeros of ``g`` inside a rectangle, or ``None`` if the boundary passes too
    close to a zero to resolve."""
    while n <= max_n:
        w = phase_winding(g, _rect_boundary(x0, x1, y0, y1, n))
        if np.isfinite(w) and abs(w - round(w)) < 1e-3:
            return int(round(w))
        n *= 2
    return None


def _newton(g, z0, lo, hi, tol=1e-14, maxiter=60):
    z = complex(z0)
    scale = max(1.0, abs(z))
    for _ in range(maxiter):
        gz = complex(g(np.array([z]))[0])
        hstep = 1e-6 * scale
        d = complex((g(np.array([z + hstep]))[0] - g(np.array([z - hstep]))[0]) / (2 * hstep))
        if d == 0:
            return None
        dz = gz / d
        z -= dz
        if not (lo.real <= z.real <= hi.real and lo.imag <= z.imag <= hi.imag):
            return None
        if abs(dz) < tol * scale:
            return z
    return z if abs(complex(g(np.array([z]))[0])) < 1e-10 else None


def find_zeros(g: Callable, x0, x1, y0, y1, min_size: float = 1e-6, depth: int = 0, max_depth: int = 30):
    """All zeros of ``g`` inside the rectangle via an argument-principle quadtree
    and Newton polishing."""
    count = count_zeros_rect(g, x0, x1, y0, y1)
    if count is None:
        # a zero sits on or very near this boundary: nudge the rectangle outwards
        e = 1e-3 * max(x1 - x0, y1 - y0)
        x0, x1, y0, y1 = x0 - e, x1 + e * 0.7, y0 - e * 0.9, y1 + e * 1.1
        count = count_zeros_rect(g, x0, x1, y0, y1)
        if count is None:
            raise ContourInvalid("argument principle failed to resolve a zero on a cell boundary")
    if count <= 0:
        return []
    size = max(x1 - x0, y1 - y0)
    if count == 1:
        z = _newton(g, complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), complex(x0, y0), complex(x1, y1))
        if z is not None:
            return [z]
    if size < min_size or depth >= max_depth:
        z = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
        return [z] * count
    # off-centre splits avoid placing cell edges on symmetric zeros
    xm = x0 + 0.5137 * (x1 - x0)
    ym = y0 + 0.4871 * (y1 - y0)
    out = []
    for a, b, c, d in ((x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)):
        out.extend(find_zeros(g, a, b, c, d, min_size, depth + 1, max_depth))
    return out
