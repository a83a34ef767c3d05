"""Continuation of the sign-changing blow-up branch and the rate fit.

A branch point at lambda = lambda0 + eps is a radial 1-node solution whose
negative core concentrates at scale delta_eps; the headline measurement is
the fit of delta_eps against |eps|, whose slope the reduced energy predicts
to be d0.

Solutions are produced by shooting: bisection on the center height, which
parameterizes exactly the bubble-dilation direction along which collocation
Jacobians are nearly singular, with RK4 density chosen per eps so that the
integration error stays far below the |eps|^3-deep structure being resolved.
(Second-order collocation cannot reach that depth at any affordable grid;
the bordered Newton solver in bn6.radial remains available for profiles away
from the blow-up regime.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bubbles import DomainBall, alpha6, bubble_radial_deriv, omega6
from .critical import ReducedEnergyConstants, admissible_eps_sign
from .errors import BranchStall, FitError, NotBlownUp, SeedFailure
from .profiles import RadialProfile
from .quadrature import gauss_panels, shooting_mesh
from .radial import GroundState, pohozaev_imbalance

__all__ = [
    "BranchPoint",
    "RateFit",
    "extract_delta",
    "seed_branch",
    "continue_branch",
    "fit_blowup_rate",
    "phi_norm_proxy",
    "shoot_sign_changing",
]

def _shoot_mesh_params(eps: float) -> tuple[int, int]:
    """Integration density needed to resolve the boundary-value bump at eps.

    The root structure in u(R; s) rides on a bump of height ~ 360 |eps|^3
    (the |eps|^3 Upsilon law scaled to the boundary), while RK4 truncation
    falls like per_decade^-4; equating the two gives per_decade ~ |eps|^-3/4.
    """
    per_decade = int(min(8192, max(1024, 1024 * (1e-2 / abs(eps)) ** 0.75)))
    outer = int(min(65536, max(8192, 8 * per_decade)))
    return per_decade, outer


@dataclass
class BranchPoint:
    """One accepted sign-changing solution on the continuation branch."""

    eps: float
    lam: float
    profile: RadialProfile
    delta_extracted: float
    node_count: int
    newton_residual: float
    phi_norm_proxy: float
    meta: dict = field(default_factory=dict)


@dataclass
class RateFit:
    """Least-squares fit of delta_extracted = d |eps| + b over the branch."""

    d_fitted: float
    intercept: float
    r_squared: float
    eps_range: tuple
    d0_predicted: float
    relative_gap: float


def extract_delta(profile: RadialProfile, gs: GroundState) -> float:
    """Concentration scale from the central value: delta = sqrt(a6/(u0(0)-min u)).

    Inverts W(0) ~ u0(0) - alpha6/delta^2 at leading order; the neglected
    eps v0(0) and boundary-constant corrections shift delta by a relative
    O(delta^2), far below fit resolution.
    """
    umin = float(np.min(profile.values))
    if umin >= 0.0:
        raise NotBlownUp("profile has no negative core minimum")
    argmin = int(np.argmin(profile.values))
    if profile.nodes[argmin] > 0.05 * profile.radius:
        raise NotBlownUp(
            f"negative minimum sits at r = {profile.nodes[argmin]:g}, not at the core"
        )
    return math.sqrt(alpha6() / (gs.max_value - umin))


def shoot_sign_changing(lam: float, eps: float, delta_guess: float,
                        gs: GroundState, v0: RadialProfile, dom: DomainBall,
                        span: float = 2.0, n_sweep: int = 41,
                        mesh_scale: float = 1.0):
    """Locate a 1-node solution by bisection on the center height.

    Sweeps center heights of the bubble family over delta in
    [delta_guess/span, delta_guess*span], brackets the sign change of
    u(R; s) closest to delta_guess, and bisects.  Returns (s_root, profile)
    or None when the sweep sees no admissible bracket.  mesh_scale
    multiplies the eps-adapted integration density (refinement studies).
    """
    per_decade, outer_n = _shoot_mesh_params(eps)
    per_decade = int(per_decade * mesh_scale)
    outer_n = int(outer_n * mesh_scale)
    mesh = shooting_mesh(delta_guess / span, dom.radius,
                         per_decade=per_decade, outer_n=outer_n)
    v0c = float(v0.values[0])

    def height(delta):
        return gs.max_value + eps * v0c - alpha6() / delta**2

    deltas = np.geomspace(delta_guess / span, delta_guess * span, n_sweep)
    heights = np.array([height(dd) for dd in deltas])
    uR = kernels.shoot_mesh_final(heights, lam, mesh)
    brackets = [
        (heights[i], heights[i + 1], uR[i], math.sqrt(deltas[i] * deltas[i + 1]))
        for i in range(n_sweep - 1)
        if (uR[i] < 0.0) != (uR[i + 1] < 0.0)
    ]
    if not brackets:
        return None
    lo, hi, f_lo, _ = min(brackets, key=lambda b: abs(math.log(b[3] / delta_guess)))
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        f_mid = kernels.shoot_mesh_final(np.array([mid]), lam, mesh)[0]
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if abs(hi - lo) < 1e-15 * abs(lo):
            break
    s_root = 0.5 * (lo + hi)
    u, up = kernels.shoot_mesh(s_root, lam, mesh)
    prof = RadialProfile(mesh, u, up, meta={"lam": lam, "kind": "shooting",
                                            "bc_residual": abs(u[-1])})
    if prof.node_count() != 1:
        return None
    return s_root, prof


def _make_point(profile: RadialProfile, eps: float, lam: float,
                gs: GroundState, v0: RadialProfile) -> BranchPoint:
    delta = extract_delta(profile, gs)
    proxy, delta_fit = phi_norm_proxy(profile, gs, v0, eps, delta)
    return BranchPoint(
        eps=eps,
        lam=lam,
        profile=profile,
        delta_extracted=delta,
        node_count=profile.node_count(),
        newton_residual=float(profile.meta.get("bc_residual", float("nan"))),
        phi_norm_proxy=proxy,
        meta={
            "delta_h1_fit": delta_fit,
            "pohozaev": pohozaev_imbalance(profile, lam),
            "method": profile.meta.get("kind", "shooting"),
        },
    )


def seed_branch(gs: GroundState, v0: RadialProfile, c: ReducedEnergyConstants,
                dom: DomainBall, eps0: float,
                d_ladder=(1.0, 0.5, 2.0), eps_ladder=(1.0, 0.5, 2.0)) -> BranchPoint:
    """First accepted point of the blow-up branch near lambda0.

    Tries shooting seeds at d = multiplier * d0 over the retry ladder, then
    alternative |eps0| values; every accepted candidate must have exactly
    one interior sign change.
    """
    sign = admissible_eps_sign(c)
    if eps0 == 0.0 or (1 if eps0 > 0 else -1) != sign:
        raise SeedFailure(
            f"eps0 = {eps0:g} is outside the admissible theorem case (sign {sign:+d})"
        )
    attempts = []
    for emul in eps_ladder:
        eps = eps0 * emul
        lam = gs.lam + eps
        for dmul in d_ladder:
            delta_guess = abs(eps) * c.d0 * dmul
            got = shoot_sign_changing(lam, eps, delta_guess, gs, v0, dom)
            if got is None:
                attempts.append((eps, dmul, "no bracket"))
                continue
            _, prof = got
            if prof.node_count() != 1:
                attempts.append((eps, dmul, f"node count {prof.node_count()}"))
                continue
            return _make_point(prof, eps, lam, gs, v0)
    raise SeedFailure(f"all seed attempts failed: {attempts}")


def continue_branch(start: BranchPoint, eps_targets, gs: GroundState,
                    v0: RadialProfile, c: ReducedEnergyConstants, dom: DomainBall,
                    max_halvings: int = 10) -> list[BranchPoint]:
    """Natural-parameter continuation toward eps -> 0.

    Each step predicts the concentration scale by secant extrapolation of
    d = delta/|eps| from the last two points and re-solves by shooting
    bisection in a narrow window around it.  Failed steps are bisected in
    log |eps| up to max_halvings; exhaustion raises BranchStall carrying the
    accepted prefix.
    """
    targets = [float(e) for e in eps_targets]
    if not targets:
        return [start]
    sgn = 1 if start.eps > 0 else -1
    for e in targets:
        if e == 0.0 or (1 if e > 0 else -1) != sgn:
            raise ValueError("targets must carry the branch sign and be nonzero")
    mags = [abs(e) for e in targets]
    if sorted(mags, reverse=True) != mags:
        raise ValueError("targets must be sorted toward eps -> 0")
    if abs(mags[0] - abs(start.eps)) < 1e-15 * abs(start.eps) and len(targets) == 1:
        return [start]

    points = [start]
    queue = [t for t in targets if abs(t) < abs(start.eps) * (1 - 1e-12)]
    halvings = 0

    def step_to(eps_new: float) -> BranchPoint | None:
        lam = gs.lam + eps_new
        ds = [p.delta_extracted / abs(p.eps) for p in points[-2:]]
        d_pred = ds[-1] if len(ds) < 2 else max(0.25 * ds[-1], 2.0 * ds[-1] - ds[-2])
        got = shoot_sign_changing(lam, eps_new, abs(eps_new) * d_pred, gs, v0, dom,
                                  span=1.6, n_sweep=25)
        if got is None:
            return None
        _, prof = got
        if prof.node_count() != 1:
            return None
        return _make_point(prof, eps_new, lam, gs, v0)

    while queue:
        target = queue[0]
        point = step_to(target)
        if point is not None:
            points.append(point)
            queue.pop(0)
            continue
        halvings += 1
        if halvings > max_halvings:
            raise BranchStall(
                f"continuation stalled between eps = {points[-1].eps:g} and {target:g}",
                points=points,
            )
        mid = sgn * math.sqrt(abs(points[-1].eps) * abs(target))
        if abs(mid) >= abs(points[-1].eps) * (1 - 1e-12):
            raise BranchStall(
                f"halving exhausted at eps = {points[-1].eps:g}", points=points
            )
        queue.insert(0, mid)
    return points


def phi_norm_proxy(profile: RadialProfile, gs: GroundState, v0: RadialProfile,
                   eps: float, delta_central: float):
    """Discrete H1 norm of profile - W at the H1-fitted concentration scale.

    The scale is fitted by a golden-section search of || profile - W(delta) ||
    around the central-value extraction (which stays the headline rate
    observable); returns (proxy, delta_fit).
    """
    nodes = profile.nodes
    pts, wts = gauss_panels(nodes, 8)
    w5 = pts**5
    pd = profile.derivative(pts)

    base_d = gs.profile.derivative(pts) + eps * v0.derivative(pts)

    def h1_gap(delta):
        ders = base_d - bubble_radial_deriv(delta, pts)
        return math.sqrt(omega6() * float(np.dot((pd - ders) ** 2 * w5, wts)))

    lo, hi = 0.8 * delta_central, 1.25 * delta_central
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = h1_gap(x1), h1_gap(x2)
    for _ in range(60):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = h1_gap(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = h1_gap(x2)
    delta_fit = 0.5 * (lo + hi)
    return h1_gap(delta_fit), delta_fit


def fit_blowup_rate(branch: list[BranchPoint], c: ReducedEnergyConstants) -> RateFit:
    """Least-squares line delta = d |eps| + b over the accepted branch points."""
    if len(branch) < 4:
        raise FitError(f"need >= 4 branch points, got {len(branch)}")
    x = np.array([abs(p.eps) for p in branch])
    y = np.array([p.delta_extracted for p in branch])
    if np.max(x) / np.min(x) < 10.0:
        raise FitError("branch spans less than one decade of |eps|")
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    d_fit, intercept = float(coef[0]), float(coef[1])
    resid = y - A @ coef
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(
        d_fitted=d_fit,
        intercept=intercept,
        r_squared=r2,
        eps_range=(float(np.min(x)), float(np.max(x))),
        d0_predicted=c.d0,
        relative_gap=abs(d_fit - c.d0) / c.d0,
    )
