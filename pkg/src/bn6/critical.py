"""Critical parameter lambda0 = 2 u0(0), assumption verification, and the
constants of the reduced energy.

The reduced-energy constants feed the blow-up prediction: with s the sign of
eps and u0c = u0(0), v0c = v0(0),

    Upsilon(d, eta) = s (v0c - 1/2) a1 d^2 + d^3 (a2 <D^2u0(0) eta, eta> - a3),

    a1 = 96 omega6,   a2 = a1 / 2,   a3 = (16/9) omega6 alpha6^{3/2} u0c^{3/2}.

Upsilon has an interior maximum in d exactly when s (1 - 2 v0c) < 0, at

    d0 = a1 |1 - 2 v0c| / (3 a3),

which is the predicted limit of delta_eps / |eps| along the blow-up branch.
The quadratic and cubic coefficients are cross-checked against direct
quadrature of the bubble-region integrals in the test suite; a widely
printed variant of a3 with the core-ball volume term overcounted by a factor
6 (11/9 in place of 16/9) is retained below as a labelled diagnostic only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bubbles import DomainBall, alpha6, omega6
from .errors import AssumptionV00Violated, SignCertificationError
from .profiles import RadialProfile
from .radial import (
    GroundState,
    LinearizedSpectrum,
    first_eigenvalue,
    sector_eigenvalues,
    solve_positive,
    solve_v0,
)

__all__ = [
    "ReducedEnergyConstants",
    "AssumptionReport",
    "CriticalBundle",
    "find_lambda0",
    "compute_constants",
    "a3_core_overcount_variant",
    "upsilon",
    "admissible_eps_sign",
    "assumption_report",
    "critical_bundle",
]


@dataclass
class ReducedEnergyConstants:
    """Everything the finite-dimensional reduction needs, in closed form."""

    a1: float
    a2: float
    a3: float
    R0: float
    u0_max: float
    v0_at_center: float
    sign_condition: float  # 1 - 2 v0(0)
    d0: float
    hessian_scalar: float  # u0''(0); isotropic factor of D^2 u0(0)


@dataclass
class AssumptionReport:
    """Verdicts for the three standing assumptions on the ball."""

    lambda0: float
    lambda1: float
    eq200_residual: float  # |lambda0 - 2 u0(0)|
    nondegenerate: bool
    sector_min_abs: dict  # ell -> min_k |mu_k|
    min_abs_eigenvalue: float
    v00_margin: float  # |1 - 2 v0(0)|
    theorem_case: str  # "positive_eps" | "negative_eps"
    brackets: list = field(default_factory=list)


@dataclass
class CriticalBundle:
    """Solver outputs shared by the expansion and branch stages."""

    dom: DomainBall
    lambda0: float
    lambda1: float
    gs: GroundState
    v0: RadialProfile
    constants: ReducedEnergyConstants
    spectra: list[LinearizedSpectrum]
    report: AssumptionReport


def find_lambda0(dom: DomainBall, tol: float = 1e-9, n: int = 4096,
                 scan_points: int = 24, solve_tol: float = 1e-10):
    """Root of f(lambda) = lambda - 2 u_lambda(0) in (0, lambda1) by bisection.

    Endpoint signs are certified first (f < 0 near 0 since the ground state
    height diverges, f > 0 near lambda1 since it vanishes).  The scan records
    every sign-change bracket; the smallest root is bisected and returned.
    """
    lam1 = first_eigenvalue(dom)

    def f(lam):
        return lam - 2.0 * solve_positive(lam, dom, tol=solve_tol, n=n).max_value

    lo_end, hi_end = 0.01 * lam1, 0.99 * lam1
    f_lo, f_hi = f(lo_end), f(hi_end)
    if not (f_lo < 0.0 < f_hi):
        raise SignCertificationError(
            f"endpoint signs not certified: f({lo_end:.6g})={f_lo:.6g}, "
            f"f({hi_end:.6g})={f_hi:.6g}"
        )
    lams = np.linspace(lo_end, hi_end, scan_points)
    fvals = [f_lo] + [f(x) for x in lams[1:-1]] + [f_hi]
    brackets = [
        (float(lams[i]), float(lams[i + 1]))
        for i in range(scan_points - 1)
        if (fvals[i] < 0.0) != (fvals[i + 1] < 0.0)
    ]
    lo, hi = brackets[0]
    f_mid = None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) < tol:
            lo = hi = mid
            break
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    lambda0 = 0.5 * (lo + hi)
    diagnostics = {
        "lambda1": lam1,
        "f_lo": float(f_lo),
        "f_hi": float(f_hi),
        "brackets": brackets,
        "residual": abs(f_mid) if f_mid is not None else float("nan"),
    }
    return float(lambda0), diagnostics


def a3_core_overcount_variant(u0_max: float) -> float:
    """Cubic-coefficient variant with the core ball volume overcounted by 6.

    Printed in circulation as (11/9) omega6 alpha6^{3/2} u0(0)^{3/2}; kept
    only so reports can display the measured mismatch factor 16/11.
    """
    return (11.0 / 9.0) * omega6() * alpha6() ** 1.5 * u0_max**1.5


def compute_constants(gs: GroundState, v0: RadialProfile,
                      v00_tol: float = 1e-4) -> ReducedEnergyConstants:
    """Closed-form reduced-energy constants from the solved u0 and v0.

    a1 and a2 come from the Beta reduction of the flat bubble integrals; a3
    from the two matched bubble-region integrals at the crossover radius R0.
    The curvature u0''(0) is read off the collocation interpolant.
    """
    om = omega6()
    a1 = 96.0 * om
    a2 = a1 / 2.0
    u0c = gs.max_value
    a3 = (16.0 / 9.0) * om * alpha6() ** 1.5 * u0c**1.5
    v0c = float(v0.values[0])
    sign_condition = 1.0 - 2.0 * v0c
    if abs(sign_condition) < v00_tol:
        raise AssumptionV00Violated(
            f"|1 - 2 v0(0)| = {abs(sign_condition):.3e} below tolerance {v00_tol:g}"
        )
    d0 = a1 * abs(sign_condition) / (3.0 * a3)
    return ReducedEnergyConstants(
        a1=a1,
        a2=a2,
        a3=a3,
        R0=(alpha6() / u0c) ** 0.25,
        u0_max=u0c,
        v0_at_center=v0c,
        sign_condition=sign_condition,
        d0=d0,
        hessian_scalar=float(gs.profile.second_derivative(0.0)),
    )


def upsilon(d: float, eta, eps_sign: int, c: ReducedEnergyConstants) -> float:
    """Reduced energy Upsilon(d, eta) for the given sign of eps.

    The Hessian term uses the radial isotropy D^2 u0(0) = u0''(0) * Id, so
    <D^2 u0(0) eta, eta> = hessian_scalar |eta|^2.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    if eps_sign not in (-1, 1):
        raise ValueError("eps_sign must be +1 or -1")
    eta2 = float(np.dot(np.atleast_1d(eta), np.atleast_1d(eta)))
    quad = eps_sign * (c.v0_at_center - 0.5) * c.a1 * d * d
    cubic = d**3 * (c.a2 * c.hessian_scalar * eta2 - c.a3)
    return quad + cubic


def admissible_eps_sign(c: ReducedEnergyConstants) -> int:
    """Sign of eps for which Upsilon(., 0) has an interior maximum."""
    return -1 if c.sign_condition > 0 else 1


def _theorem_case(c: ReducedEnergyConstants) -> str:
    return "negative_eps" if admissible_eps_sign(c) < 0 else "positive_eps"


def critical_bundle(dom: DomainBall, tol: float = 1e-9, n: int = 4096,
                    ell_max: int = 10, tol_eig: float = 1e-6,
                    v00_tol: float = 1e-4, count_per_sector: int = 3,
                    scan_points: int = 24) -> CriticalBundle:
    """Run the full critical-data pipeline on one domain."""
    lambda0, diag = find_lambda0(dom, tol=tol, n=n, scan_points=scan_points)
    gs = solve_positive(lambda0, dom, tol=1e-10, n=n)
    spectra = [sector_eigenvalues(gs, ell, count_per_sector) for ell in range(ell_max + 1)]
    gs.morse_data = spectra[0]
    v0 = solve_v0(gs, dom, tol=1e-8, tol_eig=tol_eig)
    constants = compute_constants(gs, v0, v00_tol=v00_tol)
    margins = {s.sector: s.min_abs() for s in spectra}
    min_abs = min(margins.values())
    report = AssumptionReport(
        lambda0=lambda0,
        lambda1=diag["lambda1"],
        eq200_residual=abs(lambda0 - 2.0 * gs.max_value),
        nondegenerate=min_abs > tol_eig,
        sector_min_abs=margins,
        min_abs_eigenvalue=min_abs,
        v00_margin=abs(constants.sign_condition),
        theorem_case=_theorem_case(constants),
        brackets=diag["brackets"],
    )
    return CriticalBundle(
        dom=dom, lambda0=lambda0, lambda1=diag["lambda1"], gs=gs, v0=v0,
        constants=constants, spectra=spectra, report=report,
    )


def assumption_report(dom: DomainBall, **kwargs) -> AssumptionReport:
    """Consolidated verdicts for assumptions (lambda0 fixed point,
    nondegeneracy across sectors, sign condition) on one domain."""
    return critical_bundle(dom, **kwargs).report
