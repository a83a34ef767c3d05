"""bn6: a desk-scale numerical laboratory for the sign-changing blow-up
branch of -Laplace(u) = |u|u + lambda u on the unit ball in R^6.

The package solves the radial ground state, locates the critical parameter
lambda0 = 2 u0(0), verifies the standing nondegeneracy and sign assumptions,
measures the reduced-energy expansion of the blow-up ansatz, and continues
the sign-changing solution branch whose concentration rate the reduced
energy predicts in closed form.
"""

__version__ = "0.1.0"

from .bubbles import BubbleParams, DomainBall, alpha6, bubble_integrals, omega6
from .critical import (
    AssumptionReport,
    CriticalBundle,
    ReducedEnergyConstants,
    assumption_report,
    compute_constants,
    critical_bundle,
    find_lambda0,
    upsilon,
)
from .profiles import RadialProfile
from .radial import (
    GroundState,
    LinearizedSpectrum,
    first_eigenvalue,
    sector_eigenvalues,
    solve_positive,
    solve_sign_changing,
    solve_v0,
)

__all__ = [
    "__version__",
    "alpha6",
    "omega6",
    "BubbleParams",
    "DomainBall",
    "bubble_integrals",
    "RadialProfile",
    "GroundState",
    "LinearizedSpectrum",
    "first_eigenvalue",
    "solve_positive",
    "solve_v0",
    "solve_sign_changing",
    "sector_eigenvalues",
    "ReducedEnergyConstants",
    "AssumptionReport",
    "CriticalBundle",
    "find_lambda0",
    "compute_constants",
    "upsilon",
    "assumption_report",
    "critical_bundle",
]
