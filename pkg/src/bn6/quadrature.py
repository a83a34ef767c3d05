"""Graded radial meshes and composite Gauss-Legendre quadrature.

All volume integrals in this package reduce to omega6 * int f(r) r^5 dr on
[0, R].  Integrands concentrated at a scale delta (bubble powers) peak around
r ~ delta because of the r^5 weight, so meshes are geometric in r with a fixed
point density per decade between a floor well below delta and R.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

__all__ = [
    "graded_mesh",
    "shooting_mesh",
    "gauss_panels",
    "panel_quad",
    "adaptive_quad",
]


def graded_mesh(delta: float, radius: float, per_decade: int = 128, floor_factor: float = 1e-3):
    """Geometric node array {0} + geomspace(delta*floor_factor, radius).

    The Hermite cell [0, r1] contributes O((delta*floor_factor)^6 / delta^4)
    to bubble integrals, far below double precision at the default factor.
    """
    r1 = delta * floor_factor
    if r1 >= radius:
        raise ValueError("delta floor above domain radius")
    decades = np.log10(radius / r1)
    npts = int(np.ceil(decades * per_decade)) + 1
    mesh = np.empty(npts + 1)
    mesh[0] = 0.0
    mesh[1:] = np.geomspace(r1, radius, npts)
    mesh[-1] = radius
    return mesh


def shooting_mesh(delta: float, radius: float, per_decade: int = 512,
                  outer_n: int = 8192, floor_factor: float = 1e-3):
    """Integration node array for shooting through a bubble of scale delta.

    Geometric spacing resolves the core; from r_match outward a uniform grid
    keeps the RK4 step small against the O(1) outer curvature (geometric
    steps h ~ r ln10/per_decade would dominate the error budget there).
    """
    r_match = min(0.02 * radius, radius / 2)
    if delta * floor_factor >= r_match:
        raise ValueError("bubble scale too large for the shooting mesh")
    core = graded_mesh(delta, r_match, per_decade=per_decade, floor_factor=floor_factor)
    outer = np.linspace(r_match, radius, outer_n + 1)
    return np.concatenate([core[:-1], outer])


_GL_CACHE: dict = {}


def _gl(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def gauss_panels(nodes, order: int = 8):
    """Composite Gauss-Legendre points and weights over the cells of ``nodes``."""
    x, w = _gl(order)
    a = nodes[:-1]
    b = nodes[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    pts = (mid + half * x[None, :]).ravel()
    wts = (half * w[None, :]).ravel()
    return pts, wts


def panel_quad(fn, nodes, order: int = 8):
    """Integrate fn(r) over [nodes[0], nodes[-1]] with composite GL panels."""
    pts, wts = gauss_panels(nodes, order)
    return float(np.dot(fn(pts), wts))


def adaptive_quad(fn, a: float, b: float, tol: float, max_depth: int = 40,
                  order: int = 8, _initial: int = 8):
    """Locally adaptive GL quadrature with panel bisection.

    The error indicator per panel is |GL(order) - GL(2*order)|; panels above
    tol * max(1, |total|) / n_panels are split.  Raises QuadratureError when
    max_depth splits do not suffice.
    """
    nodes = np.linspace(a, b, _initial + 1)
    panels = [(nodes[i], nodes[i + 1], 0) for i in range(_initial)]
    total = 0.0
    pending = panels
    while pending:
        nxt = []
        for lo, hi, depth in pending:
            coarse = panel_quad(fn, np.array([lo, hi]), order)
            fine = panel_quad(fn, np.array([lo, 0.5 * (lo + hi), hi]), order)
            if abs(fine - coarse) <= tol * max(1.0, abs(fine)) or depth >= max_depth:
                if abs(fine - coarse) > tol * max(1.0, abs(fine)):
                    raise QuadratureError(
                        f"panel [{lo:g},{hi:g}] not converged after {depth} splits"
                    )
                total += fine
            else:
                mid = 0.5 * (lo + hi)
                nxt.append((lo, mid, depth + 1))
                nxt.append((mid, hi, depth + 1))
        pending = nxt
    return total
