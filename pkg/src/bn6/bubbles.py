"""Standard bubbles in dimension 6, their derivative kernels, the Green's
regular part on the ball, central projections, and closed-form integrals.

In n = 6 the critical exponent is 2 and the bubble family is

    U_{delta,xi}(x) = 24 delta^2 / (delta^2 + |x - xi|^2)^2,

the unique positive entire solutions of -Laplace(U) = U^2.  Everything here
is exact arithmetic on these closed forms; no PDE is solved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .profiles import RadialProfile
from .quadrature import graded_mesh

__all__ = [
    "DIM",
    "alpha6",
    "omega6",
    "BubbleParams",
    "DomainBall",
    "eval_bubble",
    "eval_kernel",
    "regular_part_ball",
    "project_bubble_central",
    "bubble_integrals",
    "bubble_radial",
    "bubble_radial_deriv",
    "pu_central_radial",
    "pu_boundary_constant",
]

DIM = 6


def alpha6() -> float:
    """Bubble normalization (n(n-2))^((n-2)/4) at n = 6: exactly 24."""
    return 24.0


def omega6() -> float:
    """Surface area of the unit sphere in R^6: 2 pi^3 / Gamma(3) = pi^3."""
    return math.pi**3


@dataclass
class DomainBall:
    """Ball of given radius centered at the origin of R^6."""

    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def center(self) -> np.ndarray:
        return np.zeros(DIM)


@dataclass
class BubbleParams:
    """Concentration parameters (delta, xi), optionally in scaled form.

    When tied to a run with parameter eps != 0 the scaled coordinates satisfy
    delta = |eps| d and xi = xi0 + sqrt(delta) eta with d in [sigma, 1/sigma]
    and |eta| <= 1/sigma.
    """

    delta: float
    xi: np.ndarray = field(default_factory=lambda: np.zeros(DIM))
    d: float | None = None
    eta: np.ndarray | None = None

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        self.xi = np.asarray(self.xi, dtype=float)
        if self.xi.shape != (DIM,):
            raise ValueError(f"xi must be a point in R^{DIM}")
        if self.eta is not None:
            self.eta = np.asarray(self.eta, dtype=float)

    def check_scaled(self, eps: float, sigma: float) -> None:
        """Validate the scaled-coordinate invariants for a given eps, sigma."""
        if not 0 < sigma < 1:
            raise ValueError("sigma must lie in (0,1)")
        if eps == 0 or self.d is None:
            raise ValueError("scaled check needs eps != 0 and d set")
        if not math.isclose(self.delta, abs(eps) * self.d, rel_tol=1e-12):
            raise ValueError("delta != |eps| * d")
        if not sigma <= self.d <= 1.0 / sigma:
            raise ValueError("d outside [sigma, 1/sigma]")
        if self.eta is not None and float(np.linalg.norm(self.eta)) > 1.0 / sigma:
            raise ValueError("|eta| > 1/sigma")


def _dist2(x, xi):
    x = np.asarray(x, dtype=float)
    diff = x - xi
    return np.sum(diff * diff, axis=-1)


def eval_bubble(p: BubbleParams, x) -> np.ndarray | float:
    """U_{delta,xi}(x) = alpha6 delta^2 / (delta^2 + |x-xi|^2)^2."""
    rho2 = _dist2(x, p.xi)
    return alpha6() * p.delta**2 / (p.delta**2 + rho2) ** 2


def eval_kernel(p: BubbleParams, j: int, x) -> np.ndarray | float:
    """Derivative kernels Z^0 = d/d delta U, Z^j = d/d xi_j U (j = 1..6)."""
    if not 0 <= j <= DIM:
        raise ValueError("kernel index must lie in 0..6")
    x = np.asarray(x, dtype=float)
    rho2 = _dist2(x, p.xi)
    den3 = (p.delta**2 + rho2) ** 3
    if j == 0:
        return 2.0 * alpha6() * p.delta * (rho2 - p.delta**2) / den3
    return 4.0 * alpha6() * p.delta**2 * (x[..., j - 1] - p.xi[j - 1]) / den3


def regular_part_ball(x, y, dom: DomainBall) -> np.ndarray | float:
    """Harmonic regular part H(x, y) on the ball via the method of images.

    H solves Laplace H(., y) = 0 with boundary trace |x - y|^{-4}; on the
    ball it reduces to the manifestly symmetric stable form

        H(x, y) = R^4 / (|x|^2 |y|^2 - 2 R^2 <x, y> + R^4)^2,

    which has the correct limit R^{-4} when y is the center.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    R = dom.radius
    nx2 = np.sum(x * x, axis=-1)
    ny2 = np.sum(y * y, axis=-1)
    if np.any(nx2 > R * R * (1 + 1e-14)) or np.any(ny2 > R * R * (1 + 1e-14)):
        raise ValueError("points must lie in the closed ball")
    dot = np.sum(x * y, axis=-1)
    den = nx2 * ny2 - 2.0 * R * R * dot + R**4
    return R**4 / (den * den)


# -- central-bubble radial helpers (exact closed forms) ----------------------


def bubble_radial(delta: float, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return alpha6() * delta**2 / (delta**2 + r * r) ** 2


def bubble_radial_deriv(delta: float, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return -4.0 * alpha6() * delta**2 * r / (delta**2 + r * r) ** 3


def pu_boundary_constant(delta: float, radius: float) -> float:
    """Boundary trace of the central bubble: U_{delta,0}(|x| = R)."""
    return alpha6() * delta**2 / (delta**2 + radius**2) ** 2


def pu_central_radial(delta: float, radius: float, r) -> np.ndarray:
    """Central projection PU_{delta,0}(r) = U_{delta,0}(r) - U_{delta,0}(R).

    For xi at the center, U's boundary trace is constant and its harmonic
    extension is that constant, so the projection is exact.
    """
    return bubble_radial(delta, r) - pu_boundary_constant(delta, radius)


def project_bubble_central(p: BubbleParams, dom: DomainBall, nodes=None) -> RadialProfile:
    """PU_{delta,0} as a sampled radial profile (exact values and slopes)."""
    if float(np.linalg.norm(p.xi)) != 0.0:
        raise ValueError("exact projection requires xi at the ball center")
    if nodes is None:
        nodes = graded_mesh(p.delta, dom.radius)
    nodes = np.asarray(nodes, dtype=float)
    vals = pu_central_radial(p.delta, dom.radius, nodes)
    vals[-1] = 0.0
    return RadialProfile(nodes, vals, bubble_radial_deriv(p.delta, nodes))


def bubble_integrals() -> dict:
    """Closed-form bubble integrals over R^6 (Beta-function reductions).

    int U^3      = alpha6^3 omega6 B(3,3)/2 = alpha6^3 omega6 / 60
    int (1+|y|^2)^-4 = omega6 B(3,1)/2     = omega6 / 6
    """
    om = omega6()
    return {
        "intU3": alpha6() ** 3 * om / 60.0,
        "intW4": om / 6.0,
    }
