"""Exception taxonomy for the bn6 laboratory.

Every failure mode that a caller is expected to branch on gets its own class;
generic misuse (bad argument types, contract violations) raises ValueError.
"""


class Bn6Error(Exception):
    """Base class for all bn6-specific failures."""


class NoSolutionInRange(Bn6Error):
    """Positive solution requested outside (0, lambda_1)."""


class BracketFailure(Bn6Error):
    """A shooting sweep found no sign change of the boundary value."""

    def __init__(self, message, sweep=None):
        super().__init__(message)
        self.sweep = sweep  # optional list of (parameter, boundary value)


class DegenerateLinearization(Bn6Error):
    """The linearized operator has an eigenvalue within tolerance of zero."""


class ResolutionError(Bn6Error):
    """Grid too coarse for the requested number of eigenvalues."""


class ConvergenceFailure(Bn6Error):
    """Newton iteration stagnated."""

    def __init__(self, message, iterate=None, history=None):
        super().__init__(message)
        self.iterate = iterate
        self.history = history or []


class NodeCountMismatch(Bn6Error):
    """A solver result does not have the required number of interior sign changes."""


class SignCertificationError(Bn6Error):
    """Endpoint signs of the lambda_0 bisection function could not be certified."""


class AssumptionV00Violated(Bn6Error):
    """|1 - 2 v0(0)| fell below the reliability tolerance."""


class ScaleTooLarge(Bn6Error):
    """Concentration scale delta too large for the asymptotic regime."""


class QuadratureError(Bn6Error):
    """Adaptive quadrature failed to converge at the requested tolerance."""


class NotBlownUp(Bn6Error):
    """Profile has no strictly negative core minimum to invert for delta."""


class SeedFailure(Bn6Error):
    """All attempts to seed the sign-changing branch failed."""


class BranchStall(Bn6Error):
    """Continuation stopped early; partial results attached."""

    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points or []


class FitError(Bn6Error):
    """Not enough data for the blow-up rate fit."""


class ConfigError(Bn6Error):
    """Unknown key or bad value in a run configuration."""
