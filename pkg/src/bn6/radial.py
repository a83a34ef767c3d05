"""Radial solvers on the 6-ball: positive ground states by shooting, the
linear correction v0, angular-sector eigenvalues, and damped-Newton
collocation for sign-changing profiles.

The radial reduction of -Laplace(u) = |u|u + lam u on the ball of radius R is

    u'' + (5/r) u' + |u|u + lam u = 0,   u'(0) = 0,  u(R) = 0,

and the linearization around u0 in the angular sector ell carries the
centrifugal term ell(ell+4)/r^2 (spherical-harmonic eigenvalues on S^5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import jn_zeros

from . import kernels
from .bubbles import DomainBall
from .errors import (
    BracketFailure,
    ConvergenceFailure,
    DegenerateLinearization,
    NodeCountMismatch,
    NoSolutionInRange,
    ResolutionError,
)
from .profiles import RadialProfile
from .quadrature import gauss_panels

__all__ = [
    "GroundState",
    "LinearizedSpectrum",
    "first_eigenvalue",
    "uniform_nodes",
    "solve_positive",
    "solve_v0",
    "solve_linear_radial",
    "sector_eigenvalues",
    "sector_eigenvalues_potential",
    "solve_sign_changing",
    "collocation_solve",
    "newton_collocate",
    "pohozaev_imbalance",
]

SWEEP_LO = 1e-3
SWEEP_HI = 1e3
SWEEP_POINTS = 181


@dataclass
class LinearizedSpectrum:
    """Lowest eigenvalues of the linearized operator in one angular sector."""

    sector: int
    eigenvalues: list[float]

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    @property
    def negative_count(self) -> int:
        return sum(1 for m in self.eigenvalues if m < 0)

    def min_abs(self) -> float:
        return min(abs(m) for m in self.eigenvalues)


@dataclass
class GroundState:
    """Least-energy positive radial solution at a given lambda."""

    profile: RadialProfile
    lam: float
    max_value: float
    morse_data: LinearizedSpectrum | None = None
    shooting_residual: float = 0.0

    @property
    def radius(self) -> float:
        return self.profile.radius

    def potential_arrays(self):
        """(q, q') samples of the linearization potential 2|u0| + lam."""
        q = 2.0 * np.abs(self.profile.values) + self.lam
        qp = 2.0 * np.sign(self.profile.values) * self.profile.derivs
        return q, qp


def first_eigenvalue(dom: DomainBall) -> float:
    """First Dirichlet eigenvalue of -Laplace on the 6-ball: (j_{2,1}/R)^2."""
    return float((jn_zeros(2, 1)[0] / dom.radius) ** 2)


def uniform_nodes(radius: float, n: int) -> np.ndarray:
    return np.linspace(0.0, radius, n + 1)


def solve_positive(lam: float, dom: DomainBall, tol: float = 1e-10,
                   n: int = 4096) -> GroundState:
    """Positive radial solution by shooting on u(0), least-energy branch.

    The shooting height sweeps a geometric grid; the least-energy solution is
    the smallest bracketed height (on the ball the positive solution is
    unique, so this is a tie-break against spurious discrete brackets).
    """
    lam1 = first_eigenvalue(dom)
    if not 0.0 < lam < lam1:
        raise NoSolutionInRange(
            f"positive solutions require 0 < lambda < lambda1 = {lam1:.9g}; got {lam:.9g}"
        )
    nodes = uniform_nodes(dom.radius, n)
    coarse = uniform_nodes(dom.radius, max(256, n // 8))
    lo_s, hi_s = SWEEP_LO, SWEEP_HI
    bracket = None
    for _ in range(5):  # extend upward while the ground state height is beyond hi_s
        sweep = np.geomspace(lo_s, hi_s, SWEEP_POINTS)
        vals = kernels.shoot_mesh_final(sweep, lam, coarse)
        for i in range(len(sweep) - 1):
            if vals[i] > 0.0 and vals[i + 1] < 0.0:
                bracket = (sweep[i], sweep[i + 1])
                break
        if bracket is not None or vals[-1] <= 0.0:
            break
        lo_s, hi_s = hi_s, hi_s * 1e3
    if bracket is None:
        raise BracketFailure(
            "no sign change of u(R; s) over the shooting sweep",
            sweep=list(zip(sweep.tolist(), np.asarray(vals).tolist())),
        )
    lo, hi = bracket
    f_lo = kernels.shoot_mesh_final(np.array([lo]), lam, nodes)[0]
    if f_lo < 0.0:
        # coarse/fine grids disagree at the bracket edge; nudge down
        lo *= 0.5
        f_lo = kernels.shoot_mesh_final(np.array([lo]), lam, nodes)[0]
        if f_lo < 0.0:
            raise BracketFailure("bracket lost on the fine grid")
    # drive the height interval to machine width: downstream consumers
    # (the lambda0 bisection in particular) need u(0) smooth in lambda at
    # far better resolution than the boundary-value tolerance alone gives
    for _ in range(200):
        if (hi - lo) < 4.0 * np.finfo(float).eps * hi:
            break
        mid = 0.5 * (lo + hi)
        f_mid = kernels.shoot_mesh_final(np.array([mid]), lam, nodes)[0]
        if f_mid > 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    s_star = 0.5 * (lo + hi)
    u, up = kernels.shoot_mesh(s_star, lam, nodes)
    resid = abs(u[-1])
    if resid > tol:
        raise BracketFailure(
            f"shooting residual {resid:.3e} above tol at the machine-width bracket"
        )
    prof = RadialProfile(nodes, u, up, meta={"lam": lam, "kind": "positive"})
    return GroundState(profile=prof, lam=lam, max_value=s_star, shooting_residual=resid)


# ---------------------------------------------------------------------------
# linear radial solve (v0) by second-order finite differences
# ---------------------------------------------------------------------------


def _fd_system(q: np.ndarray, forcing: np.ndarray, nodes: np.ndarray):
    """Banded system for v'' + (5/r) v' + q v = -forcing, v'(0)=0, v(R)=0.

    Unknowns are v at nodes[0..n-1]; the center equation uses
    Laplace(v)(0) = 6 v''(0) with v''(0) = 2 (v1 - v0)/h1^2.
    """
    n = len(nodes) - 1
    h1 = nodes[1]
    band = np.zeros((3, n))
    rhs = -forcing[:n].astype(float).copy()
    band[1, 0] = -12.0 / h1**2 + q[0]
    band[0, 1] = 12.0 / h1**2
    i = np.arange(1, n)
    hm = nodes[i] - nodes[i - 1]
    hp = nodes[i + 1] - nodes[i]
    den = hm * hp * (hm + hp)
    lower = (2.0 * hp - hp**2 * 5.0 / nodes[i]) / den
    diag = (-2.0 * (hm + hp) + (hp**2 - hm**2) * 5.0 / nodes[i]) / den + q[i]
    upper = (2.0 * hm + hm**2 * 5.0 / nodes[i]) / den
    band[1, 1:] = diag
    band[0, 2:] = upper[:-1]
    band[2, 0:-1] = lower
    return band, rhs, (lower, diag, upper)


def _deriv4_uniform(v: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative on a uniform grid."""
    n = len(v)
    d = np.empty(n)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-2] = -(-3 * v[-1] - 10 * v[-2] + 18 * v[-3] - 6 * v[-4] + v[-5]) / (12 * h)
    d[-1] = -(-25 * v[-1] + 48 * v[-2] - 36 * v[-3] + 16 * v[-4] - 3 * v[-5]) / (12 * h)
    return d


def solve_linear_radial(q: np.ndarray, forcing: np.ndarray, nodes: np.ndarray,
                        tol: float = 1e-8) -> RadialProfile:
    """Solve v'' + (5/r)v' + q v = -forcing with v'(0)=0, v(R)=0 (banded LU).

    Iterative refinement with extended-precision residuals drives the
    algebraic defect of the stencil equations to its double-quantization
    optimum; the defect must stay below tol relative to the forcing's max
    norm (the absolute defect carries an irreducible eps/h^2 floor from the
    second-difference rows, about 2e-8 at n = 4096).
    """
    band, rhs, (lower, diag, upper) = _fd_system(q, forcing, nodes)
    n = len(nodes) - 1
    v = solve_banded((1, 1), band, rhs)

    def residual_ld(vv):
        vl = vv.astype(np.longdouble)
        res = np.empty(n, dtype=np.longdouble)
        res[0] = (np.longdouble(band[1, 0]) * vl[0]
                  + np.longdouble(band[0, 1]) * vl[1] - np.longdouble(rhs[0]))
        vfull = np.append(vl, np.longdouble(0.0))
        i = np.arange(1, n)
        res[1:] = (lower.astype(np.longdouble) * vfull[i - 1]
                   + diag.astype(np.longdouble) * vfull[i]
                   + upper.astype(np.longdouble) * vfull[i + 1]
                   - rhs[1:].astype(np.longdouble))
        return res

    scale = max(1.0, float(np.max(np.abs(forcing))))
    best = v
    best_defect = float(np.max(np.abs(residual_ld(v))))
    for _ in range(5):
        if best_defect <= 0.1 * tol * scale:
            break
        v = best - solve_banded((1, 1), band, residual_ld(best).astype(float))
        defect = float(np.max(np.abs(residual_ld(v))))
        if defect >= best_defect:
            break
        best, best_defect = v, defect
    v = best
    if best_defect > tol * scale:
        raise ConvergenceFailure(
            f"refined banded-solve defect {best_defect:.3e} above tol*|forcing|"
        )
    vfull = np.append(v, 0.0)
    h = nodes[1] - nodes[0]
    derivs = _deriv4_uniform(vfull, h)
    derivs[0] = 0.0
    return RadialProfile(nodes, vfull, derivs)


def solve_v0(gs: GroundState, dom: DomainBall, tol: float = 1e-8,
             tol_eig: float = 1e-6) -> RadialProfile:
    """Radial solution of the linear problem -Laplace(v0) - (2|u0|+lam0) v0 = u0.

    The ell=0 linearization must be safely invertible; a near-zero eigenvalue
    raises DegenerateLinearization (failure of the nondegeneracy assumption).
    """
    spec0 = sector_eigenvalues(gs, 0, 3)
    if spec0.min_abs() < tol_eig:
        raise DegenerateLinearization(
            f"ell=0 eigenvalue {spec0.min_abs():.3e} within tol_eig of zero"
        )
    q, _ = gs.potential_arrays()
    prof = solve_linear_radial(q, gs.profile.values, gs.profile.nodes, tol=tol)
    prof.meta.update({"lam": gs.lam, "kind": "v0"})
    return prof


# ---------------------------------------------------------------------------
# sector eigenvalues by oscillation-counting shooting
# ---------------------------------------------------------------------------


def _polish_root(boundary, lo: float, hi: float, f_lo: float, f_hi: float) -> float:
    """Bisection then secant on the boundary value psi(R; mu) over a sign bracket."""
    for _ in range(70):
        mid = 0.5 * (lo + hi)
        fm = boundary(np.array([mid]))[0][0]
        if (fm < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
        if hi - lo < 1e-9 * max(1.0, abs(hi)):
            break
    m0, f0, m1, f1 = lo, f_lo, hi, f_hi
    for _ in range(10):
        if f1 == f0:
            break
        m2 = m1 - f1 * (m1 - m0) / (f1 - f0)
        if not min(m0, m1) - (hi - lo) <= m2 <= max(m0, m1) + (hi - lo):
            break
        m0, f0 = m1, f1
        m1 = m2
        f1 = boundary(np.array([m1]))[0][0]
        if abs(m1 - m0) < 1e-14 * max(1.0, abs(m1)):
            break
    return m1


def _sector_eigs_raw(q: np.ndarray, qp: np.ndarray, h: float, ell: int,
                     count: int) -> list[float]:
    """March mu upward, bracketing sign changes of psi(R; mu).

    The interior oscillation count guards the march: a step over which the
    count jumps by more than the observed sign changes hides an eigenvalue
    pair and is subdivided.  (The count alone transitions one cell early, at
    the eigenvalue of the grid shrunk by h, so roots come from the boundary
    value, never from the count.)
    """
    npts = len(q)
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > npts // 64:
        raise ResolutionError(f"grid of {npts} points too coarse for {count} eigenvalues")

    def boundary(mus):
        return kernels.eig_shoot_batch(q, qp, h, ell, np.atleast_1d(mus))

    mu = -float(np.max(q)) - 1.0
    fr, cr = boundary(np.array([mu]))
    f_prev, c_prev = fr[0], cr[0]
    step = 4.0
    eigs: list[float] = []
    for _ in range(200000):
        if len(eigs) >= count:
            break
        mu2 = mu + step
        fr, cr = boundary(np.array([mu2]))
        f2, c2 = fr[0], cr[0]
        flipped = (f2 < 0.0) != (f_prev < 0.0)
        jump = int(c2 - c_prev)
        if not flipped and jump == 0:
            mu, f_prev, c_prev = mu2, f2, c2
            step = min(step * 1.6, 64.0)
            continue
        if flipped and jump <= 1:
            eigs.append(_polish_root(boundary, mu, mu2, f_prev, f2))
            mu, f_prev, c_prev = mu2, f2, c2
            step = max(step / 2.0, 1e-2)
            continue
        # ambiguous step (possible skipped pair): subdivide
        step *= 0.5
        if step < 1e-10 * max(1.0, abs(mu)):
            raise ResolutionError("unresolved eigenvalue cluster in the mu march")
    else:  # pragma: no cover
        raise ResolutionError("eigenvalue march did not terminate")
    return eigs[:count]


def sector_eigenvalues_potential(potential: RadialProfile | None, dom: DomainBall,
                                 ell: int, count: int, n: int = 4096) -> LinearizedSpectrum:
    """Lowest eigenvalues of -psi'' - (5/r)psi' + ell(ell+4)/r^2 psi - q psi = mu psi.

    potential=None means q = 0 (free Dirichlet ball operator in sector ell,
    whose eigenvalues are squared Bessel zeros j_{2+ell,k}^2 / R^2).
    """
    if ell < 0:
        raise ValueError("sector index must be nonnegative")
    nodes = uniform_nodes(dom.radius, n)
    if potential is None:
        q = np.zeros(n + 1)
        qp = np.zeros(n + 1)
    else:
        q = potential(nodes)
        qp = potential.derivative(nodes)
    h = nodes[1] - nodes[0]
    eigs = _sector_eigs_raw(q, qp, h, ell, count)
    return LinearizedSpectrum(sector=ell, eigenvalues=[float(m) for m in eigs])


def sector_eigenvalues(gs: GroundState, ell: int, count: int) -> LinearizedSpectrum:
    """Spectrum of the linearization around the positive solution in sector ell."""
    if ell < 0:
        raise ValueError("sector index must be nonnegative")
    q, qp = gs.potential_arrays()
    nodes = gs.profile.nodes
    h = nodes[1] - nodes[0]
    eigs = _sector_eigs_raw(q, qp, h, ell, count)
    return LinearizedSpectrum(sector=ell, eigenvalues=[float(m) for m in eigs])


# ---------------------------------------------------------------------------
# damped Newton on the collocated nonlinear system
# ---------------------------------------------------------------------------


def _residual_colloc(u: np.ndarray, nodes: np.ndarray, lam: float) -> np.ndarray:
    n = len(nodes) - 1
    F = np.empty(n)
    F[0] = 12.0 * (u[1] - u[0]) / nodes[1] ** 2 + abs(u[0]) * u[0] + lam * u[0]
    i = np.arange(1, n)
    hm = nodes[i] - nodes[i - 1]
    hp = nodes[i + 1] - nodes[i]
    den = hm * hp * (hm + hp)
    upp = 2.0 * (hm * u[i + 1] - (hm + hp) * u[i] + hp * u[i - 1]) / den
    up = (hm**2 * u[i + 1] + (hp**2 - hm**2) * u[i] - hp**2 * u[i - 1]) / den
    F[1:] = upp + 5.0 / nodes[i] * up + np.abs(u[i]) * u[i] + lam * u[i]
    return F


def _jacobian_banded(u: np.ndarray, nodes: np.ndarray, lam: float) -> np.ndarray:
    n = len(nodes) - 1
    i = np.arange(1, n)
    hm = nodes[i] - nodes[i - 1]
    hp = nodes[i + 1] - nodes[i]
    den = hm * hp * (hm + hp)
    lower = (2.0 * hp - hp**2 * 5.0 / nodes[i]) / den
    diag = (-2.0 * (hm + hp) + (hp**2 - hm**2) * 5.0 / nodes[i]) / den \
        + 2.0 * np.abs(u[i]) + lam
    upper = (2.0 * hm + hm**2 * 5.0 / nodes[i]) / den
    band = np.zeros((3, n))
    band[1, 0] = -12.0 / nodes[1] ** 2 + 2.0 * abs(u[0]) + lam
    band[0, 1] = 12.0 / nodes[1] ** 2
    band[1, 1:] = diag
    band[0, 2:] = upper[:-1]
    band[2, 0:-1] = lower
    return band


def _scaled_norm(F: np.ndarray, u: np.ndarray, lam: float) -> float:
    scale = 1.0 + u[: len(F)] ** 2 + abs(lam) * np.abs(u[: len(F)])
    return float(np.linalg.norm(F / scale) / np.sqrt(len(F)))


def newton_collocate(init_values: np.ndarray, nodes: np.ndarray, lam: float,
                     tol: float = 1e-11, max_iter: int = 80,
                     stall_tol: float | None = None):
    """Damped Newton for the collocated radial system.

    Returns (values, res, iterations, history, stalled).  The line search is
    Armijo on the residual norm scaled by the frozen local equation scale;
    steps are clipped to a 50% relative move per node.  A stagnating
    iteration (five steps without a 2% decrease) with residual below
    stall_tol is returned with stalled=True; otherwise ConvergenceFailure.
    """
    u = np.array(init_values, dtype=float)
    u[-1] = 0.0
    n = len(nodes) - 1
    history = []
    for it in range(max_iter):
        F = _residual_colloc(u, nodes, lam)
        res = _scaled_norm(F, u, lam)
        history.append(res)
        if res < tol:
            return u, res, it, history, False
        stagnated = len(history) > 5 and history[-6] < history[-1] * 1.02
        if stagnated:
            if res < 8.0 * _floor_estimate(u, nodes, lam):
                return u, res, it, history, False
            if stall_tol is not None and res < stall_tol:
                return u, res, it, history, True
            raise ConvergenceFailure(
                f"Newton stagnated at scaled residual {res:.3e}",
                iterate=u, history=history,
            )
        band = _jacobian_banded(u, nodes, lam)
        du = solve_banded((1, 1), band, -F)
        relmax = float(np.max(np.abs(du) / (1.0 + np.abs(u[:n]))))
        t = min(1.0, 0.5 / relmax) if relmax > 0 else 1.0
        scale = 1.0 + u[:n] ** 2 + abs(lam) * np.abs(u[:n])
        base = float(np.linalg.norm(F / scale) / np.sqrt(n))
        accepted = False
        for _ in range(28):
            trial = u.copy()
            trial[:n] += t * du
            Ft = _residual_colloc(trial, nodes, lam)
            rt = float(np.linalg.norm(Ft / scale) / np.sqrt(n))
            if rt < base * (1.0 - 1e-4 * t) or rt < tol:
                u = trial
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if res < 8.0 * _floor_estimate(u, nodes, lam):
                return u, res, it, history, False  # stagnated at the roundoff floor
            if stall_tol is not None and res < stall_tol:
                return u, res, it, history, True
            raise ConvergenceFailure(
                f"Newton line search failed at scaled residual {res:.3e}",
                iterate=u, history=history,
            )
    F = _residual_colloc(u, nodes, lam)
    res = _scaled_norm(F, u, lam)
    history.append(res)
    if res < tol:
        return u, res, max_iter, history, False
    if stall_tol is not None and res < stall_tol:
        return u, res, max_iter, history, True
    raise ConvergenceFailure(
        f"Newton did not converge in {max_iter} iterations (residual {res:.3e})",
        iterate=u, history=history,
    )


def _nonuniform_first_derivs(nodes: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Second-order first derivative on a nonuniform grid."""
    n = len(nodes)
    d = np.empty(n)
    i = np.arange(1, n - 1)
    hm = nodes[i] - nodes[i - 1]
    hp = nodes[i + 1] - nodes[i]
    d[i] = (hm**2 * u[i + 1] + (hp**2 - hm**2) * u[i] - hp**2 * u[i - 1]) / (
        hm * hp * (hm + hp)
    )
    d[0] = 0.0
    h1 = nodes[-1] - nodes[-2]
    h2 = nodes[-2] - nodes[-3]
    d[-1] = (u[-3] * h1 / (h2 * (h1 + h2)) - u[-2] * (h1 + h2) / (h1 * h2)
             + u[-1] * (2 * h1 + h2) / (h1 * (h1 + h2)))
    return d


def _floor_estimate(u: np.ndarray, nodes: np.ndarray, lam: float) -> float:
    """Conservative scaled-residual roundoff floor of the collocation stencil.

    Overestimates the measured floor by roughly one order, which is fine for
    its single use: deciding whether a stagnated line search has hit stencil
    noise (floors ~1e-6..1e-4 here) or a genuinely singular linearization
    (stalls above 1e-1).  Never used to accept an undamaged Newton step.
    """
    n = len(nodes) - 1
    i = np.arange(1, n)
    hm = nodes[i] - nodes[i - 1]
    hp = nodes[i + 1] - nodes[i]
    amp = np.empty(n)
    amp[0] = 24.0 * abs(u[0]) / nodes[1] ** 2
    amp[1:] = 2.0 * (np.abs(u[i - 1]) + 2 * np.abs(u[i]) + np.abs(u[i + 1])) / (hm * hp)
    noise = np.finfo(float).eps * amp
    scale = 1.0 + u[:n] ** 2 + abs(lam) * np.abs(u[:n])
    return float(np.linalg.norm(noise / scale) / np.sqrt(n))


def _newton_interior(u: np.ndarray, nodes: np.ndarray, lam: float,
                     tol: float, max_iter: int = 40):
    """Damped Newton on the interior collocation equations with u(0) pinned.

    Pinning the center height removes the nearly-null bubble-dilation
    direction, so this inner system is well conditioned.  Returns
    (u, res, iterations).
    """
    n = len(nodes) - 1
    u = u.copy()
    u[-1] = 0.0
    i = np.arange(1, n)
    hm = nodes[i] - nodes[i - 1]
    hp = nodes[i + 1] - nodes[i]
    den = hm * hp * (hm + hp)
    lower = (2.0 * hp - hp**2 * 5.0 / nodes[i]) / den
    upper = (2.0 * hm + hm**2 * 5.0 / nodes[i]) / den
    lin_diag = (-2.0 * (hm + hp) + (hp**2 - hm**2) * 5.0 / nodes[i]) / den

    def interior_residual(uu):
        F = _residual_colloc(uu, nodes, lam)
        return F[1:]

    def scaled(F, uu):
        sc = 1.0 + uu[1:n] ** 2 + abs(lam) * np.abs(uu[1:n])
        return float(np.linalg.norm(F / sc) / np.sqrt(n - 1))

    total_res = None
    for it in range(max_iter):
        F = interior_residual(u)
        total_res = scaled(F, u)
        if total_res < tol:
            return u, total_res, it
        diag = lin_diag + 2.0 * np.abs(u[i]) + lam
        band = np.zeros((3, n - 1))
        band[1, :] = diag
        band[0, 1:] = upper[:-1]
        band[2, :-1] = lower[1:]
        du = solve_banded((1, 1), band, -F)
        relmax = float(np.max(np.abs(du) / (1.0 + np.abs(u[1:n]))))
        t = min(1.0, 0.7 / relmax) if relmax > 0 else 1.0
        sc = 1.0 + u[1:n] ** 2 + abs(lam) * np.abs(u[1:n])
        base = float(np.linalg.norm(F / sc) / np.sqrt(n - 1))
        accepted = False
        for _ in range(30):
            trial = u.copy()
            trial[1:n] += t * du
            Ft = interior_residual(trial)
            rt = float(np.linalg.norm(Ft / sc) / np.sqrt(n - 1))
            if rt < base * (1.0 - 1e-4 * t) or rt < tol:
                u = trial
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if total_res < 8.0 * _floor_estimate(u, nodes, lam):
                return u, total_res, it  # stagnated at the roundoff floor
            raise ConvergenceFailure(
                f"interior Newton line search failed at residual {total_res:.3e}",
                iterate=u,
            )
    raise ConvergenceFailure(
        f"interior Newton did not converge ({total_res:.3e} after {max_iter} iterations)",
        iterate=u,
    )


def collocation_solve(lam: float, init: RadialProfile, dom: DomainBall,
                      tol: float = 1e-11, max_outer: int = 40) -> RadialProfile:
    """Solve the full collocated system by bordered damped Newton.

    The center height s = u(0) parameterizes the bubble-dilation direction
    along which the plain Newton system is nearly singular.  Each outer step
    pins s, converges the interior equations by damped Newton, and applies
    one exact Newton update to s through the Schur complement of the center
    equation (one extra banded solve) - block-elimination Newton on the full
    system.  The result solves every collocation equation to tolerance.
    """
    if abs(init.radius - dom.radius) > 1e-12 * dom.radius:
        raise ValueError("initial guess radius does not match the domain")
    nodes = init.nodes
    n = len(nodes) - 1
    total_inner = 0
    i = np.arange(1, n)
    hm = nodes[i] - nodes[i - 1]
    hp = nodes[i + 1] - nodes[i]
    den = hm * hp * (hm + hp)
    lower = (2.0 * hp - hp**2 * 5.0 / nodes[i]) / den
    upper = (2.0 * hm + hm**2 * 5.0 / nodes[i]) / den
    lin_diag = (-2.0 * (hm + hp) + (hp**2 - hm**2) * 5.0 / nodes[i]) / den

    def center_raw(uu):
        return 12.0 * (uu[1] - uu[0]) / nodes[1] ** 2 + abs(uu[0]) * uu[0] + lam * uu[0]

    def center_scale(uu):
        return 1.0 + uu[0] ** 2 + abs(lam) * abs(uu[0])

    def center_floor(uu):
        amp = np.finfo(float).eps * 24.0 * (abs(uu[0]) + abs(uu[1])) / nodes[1] ** 2
        return amp / center_scale(uu)

    def solve_at(s, guess):
        nonlocal total_inner
        uu = guess.copy()
        uu[0] = s
        uu, _, iters = _newton_interior(uu, nodes, lam, tol=tol)
        total_inner += iters + 1
        return uu

    def center_slope(uu):
        # du_1/ds from the interior linearization: J_int w = -dF_int/ds,
        # where only the first interior row depends on u(0)
        diag = lin_diag + 2.0 * np.abs(uu[i]) + lam
        band = np.zeros((3, n - 1))
        band[1, :] = diag
        band[0, 1:] = upper[:-1]
        band[2, :-1] = lower[1:]
        rhs = np.zeros(n - 1)
        rhs[0] = -lower[0]
        w = solve_banded((1, 1), band, rhs)
        return 12.0 * (w[0] - 1.0) / nodes[1] ** 2 + 2.0 * abs(uu[0]) + lam

    s = float(init.values[0])
    u_cur = solve_at(s, np.asarray(init.values, dtype=float))
    f = center_raw(u_cur)
    lo = hi = None
    outer_steps = 0
    for _ in range(max_outer):
        if abs(f) / center_scale(u_cur) < max(tol, 8.0 * center_floor(u_cur)):
            break
        slope = center_slope(u_cur)
        if slope == 0.0:
            raise ConvergenceFailure("bordered Newton: singular center slope",
                                     iterate=u_cur)
        s2 = s - f / slope
        if lo is not None and not lo[0] < s2 < hi[0]:
            s2 = 0.5 * (lo[0] + hi[0])
        step_cap = 0.5 * (1.0 + abs(s))
        if abs(s2 - s) > step_cap:
            s2 = s + math.copysign(step_cap, s2 - s)
        outer_steps += 1
        u2 = solve_at(s2, u_cur)
        f2 = center_raw(u2)
        if f2 * f < 0:
            lo, hi = sorted([(s, f), (s2, f2)], key=lambda p: p[0])
        elif lo is not None:
            if (f2 < 0) == (lo[1] < 0):
                lo = (s2, f2)
            else:
                hi = (s2, f2)
        s, f, u_cur = s2, f2, u2
    else:
        raise ConvergenceFailure(
            f"bordered Newton: center equation stalled at {f:.3e}", iterate=u_cur
        )
    prof = RadialProfile(nodes, u_cur, _nonuniform_first_derivs(nodes, u_cur),
                         meta={"lam": lam, "kind": "collocation",
                               "newton_residual": abs(f) / center_scale(u_cur),
                               "newton_iterations": total_inner,
                               "newton_outer_iterations": outer_steps})
    return prof


def solve_sign_changing(lam: float, init: RadialProfile, dom: DomainBall,
                        tol: float = 1e-11, max_outer: int = 40) -> RadialProfile:
    """Sign-changing radial solution by bordered damped Newton collocation.

    The converged profile must change sign in the interior; a nodeless result
    raises NodeCountMismatch (the contract excludes the positive branch).
    """
    prof = collocation_solve(lam, init, dom, tol=tol, max_outer=max_outer)
    prof.meta["kind"] = "sign-changing"
    if prof.node_count() < 1:
        raise NodeCountMismatch(
            f"converged profile has no interior sign change (nodes={prof.node_count()})"
        )
    return prof


def pohozaev_imbalance(profile: RadialProfile, lam: float) -> float:
    """Relative defect of the Pohozaev balance lam*int u^2 r^5 dr = R^6 u'(R)^2 / 2.

    Vanishes (to discretization error) on every true solution; the balance is
    the nonexistence certificate for lam <= 0 on star-shaped domains.
    """
    pts, wts = gauss_panels(profile.nodes, order=8)
    vol = lam * float(np.dot(profile(pts) ** 2 * pts**5, wts))
    bdry = profile.radius**6 * profile.derivs[-1] ** 2 / 2.0
    return abs(vol - bdry) / (abs(vol) + abs(bdry) + 1e-300)
