"""Ansatz assembly, energy quadrature, defect scaling, and the reduced-energy
measurement.  Oracles: the Nehari identity for the ground-state energy, a
trapezoid reference quadrature, Richardson behavior in eps, and the exact
algebraic identity connecting the term-by-term decomposition to J(W)."""

import math

import numpy as np
import pytest

from bn6.bubbles import alpha6, bubble_integrals, omega6
from bn6.critical import admissible_eps_sign
from bn6.errors import ScaleTooLarge
from bn6.expansion import (
    assemble_ansatz,
    crossover_radius,
    defect_l32_profile,
    energy,
    energy_c0,
    expansion_check,
    i_term_audit,
    residual_l32,
)
from bn6.profiles import RadialProfile


@pytest.fixture(scope="module")
def sign(constants):
    return admissible_eps_sign(constants)


# -- assembly -----------------------------------------------------------------


def test_ansatz_boundary_and_center(gs, v0, ball, constants, sign):
    eps = sign * 1e-2
    b = assemble_ansatz(gs, v0, eps, constants.d0, ball)
    assert abs(b.w.values[-1]) < 1e-9
    delta = abs(eps) * constants.d0
    expected_center = (gs.max_value + eps * v0.values[0] - alpha6() / delta**2
                       + alpha6() * delta**2 / (delta**2 + ball.radius**2) ** 2)
    assert b.w.values[0] == pytest.approx(expected_center, rel=1e-12)
    assert b.params.delta == abs(eps) * constants.d0


def test_ansatz_eps_linearity(gs, v0, ball, constants, sign):
    """At fixed delta the eps-dependence is exactly the eps*v0 term.

    Power-of-two eps values keep delta = |eps| d bitwise identical between
    the two assemblies, so the bubble parts cancel exactly.
    """
    e1 = sign * 2.0**-10
    e2 = sign * 2.0**-9
    b1 = assemble_ansatz(gs, v0, e1, constants.d0, ball)
    b2 = assemble_ansatz(gs, v0, e2, constants.d0 / 2.0, ball)
    assert b1.delta == b2.delta
    r = np.linspace(0.0, ball.radius, 500)
    diff = b2.w_values(r) - b1.w_values(r)
    # away from the core the match is exact; at the core W ~ -alpha6/delta^2
    # and the eps*v0 increment sits below one ulp of W itself
    ulp_floor = np.spacing(alpha6() / b1.delta**2)
    assert np.max(np.abs(diff - (e2 - e1) * v0(r)) - ulp_floor) < 1e-11


def test_ansatz_scale_too_large(gs, v0, ball):
    with pytest.raises(ScaleTooLarge):
        assemble_ansatz(gs, v0, -0.5, 1.5, ball)  # delta = 0.75 >= R/2


def test_ansatz_sign_structure(gs, v0, ball, constants, sign):
    """Negative core inside ~R0 sqrt(delta), positive bulk outside."""
    eps = sign * 1e-3
    b = assemble_ansatz(gs, v0, eps, constants.d0, ball)
    rho = constants.R0 * math.sqrt(b.delta)
    inner = np.geomspace(b.delta / 10, 0.8 * rho, 50)
    outer = np.linspace(1.3 * rho, 0.9 * ball.radius, 50)
    assert np.all(b.w_values(inner) < 0)
    assert np.all(b.w_values(outer) > 0)


def test_crossover_converges_to_r0(gs, v0, ball, constants, sign):
    mags = [10**-1.5, 10**-2, 10**-2.5, 10**-3]
    roots = []
    for mag in mags:
        b = assemble_ansatz(gs, v0, sign * mag, constants.d0, ball)
        roots.append((math.sqrt(b.delta), crossover_radius(b) / math.sqrt(b.delta)))
    x = np.array([a for a, _ in roots])
    y = np.array([b for _, b in roots])
    rho0 = float(np.polyfit(x, y, 1)[1])
    assert abs(rho0 - constants.R0) / constants.R0 < 0.02
    assert all(abs(r - constants.R0) / constants.R0 < 0.02 for _, r in roots)


# -- energy -------------------------------------------------------------------


def test_energy_of_zero_profile(ball):
    nodes = np.linspace(0.0, 1.0, 101)
    zero = RadialProfile(nodes, np.zeros_like(nodes), np.zeros_like(nodes))
    assert energy(zero, 5.0) == 0.0


def test_energy_nehari_identity(gs):
    """J(u0) = (1/6) int |u0|^3 for solutions at their own lambda."""
    j = energy(gs.profile, gs.lam)
    nodes = gs.profile.nodes
    cubic = omega6() * np.trapezoid(np.abs(gs.profile.values) ** 3 * nodes**5, nodes)
    assert j > 0
    assert j == pytest.approx(cubic / 6.0, rel=1e-6)


def test_energy_matches_trapezoid_reference(gs):
    """Two independent quadratures agree on a smooth profile."""
    r = np.linspace(0.0, 1.0, 400001)
    vals = gs.profile(r)
    ders = gs.profile.derivative(r)
    dens = 0.5 * ders**2 - 0.5 * gs.lam * vals**2 - np.abs(vals) ** 3 / 3.0
    ref = omega6() * np.trapezoid(dens * r**5, r)
    assert energy(gs.profile, gs.lam) == pytest.approx(ref, rel=1e-8)


def test_pure_bubble_energy_limit(gs, v0, ball):
    """(1/2)|grad PU|^2 - (1/3) int PU^3 -> (1/6) int U^3 with slope ~4."""
    intU3 = bubble_integrals()["intU3"]
    errs = []
    deltas = [0.05, 0.025, 0.0125]
    for delta in deltas:
        audit_terms = i_term_audit(gs, v0, -delta / 0.03, 0.03, ball)
        errs.append(abs(audit_terms["I2_minus_limit"]))
    assert errs[0] / intU3 < 1e-4
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) > 3.2  # delta^4 up to the log-free window


def test_i2_limit_slope_in_eps(gs, v0, ball, constants, sign):
    mags = [10**-1.5, 10**-2, 10**-2.5]
    vals = [abs(i_term_audit(gs, v0, sign * m, constants.d0, ball)["I2_minus_limit"])
            for m in mags]
    slope = np.polyfit(np.log(mags), np.log(vals), 1)[0]
    assert abs(slope - 4.0) <= 0.3


# -- defect -------------------------------------------------------------------


def test_residual_scaling_law(gs, v0, ball, constants, sign):
    """|R|_{3/2} / (eps^2 |ln eps|^{2/3}) varies by < 2x over the sweep."""
    ratios = []
    for mag in (10**-1.5, 10**-2, 10**-2.5, 10**-3):
        b = assemble_ansatz(gs, v0, sign * mag, constants.d0, ball)
        res = residual_l32(b)
        ratios.append(res / (mag**2 * abs(math.log(mag)) ** (2.0 / 3.0)))
    assert max(ratios) / min(ratios) < 2.0


def test_residual_uniform_in_d(gs, v0, ball, constants, sign):
    """Doubling d changes the defect by an O(1) factor, not an order."""
    eps = sign * 1e-3
    r1 = residual_l32(assemble_ansatz(gs, v0, eps, constants.d0, ball))
    r2 = residual_l32(assemble_ansatz(gs, v0, eps, 2.0 * constants.d0, ball))
    assert 0.2 < r2 / r1 < 5.0


def test_residual_grid_refinement_stable(gs, v0, ball, constants, sign):
    eps = sign * 1e-3
    r1 = residual_l32(assemble_ansatz(gs, v0, eps, constants.d0, ball, per_decade=128))
    r2 = residual_l32(assemble_ansatz(gs, v0, eps, constants.d0, ball, per_decade=256))
    assert abs(r2 - r1) / r1 < 0.01


def test_exact_solution_has_small_interpolant_defect(gs):
    """A converged solution's strong-form defect is discretization noise."""
    defect = defect_l32_profile(gs.profile, gs.lam)
    # compare against the same measure for the ansatz at a moderate eps
    assert defect < 1e-4


# -- the reduced-energy law ---------------------------------------------------


def test_expansion_matches_upsilon(gs, v0, constants, ball, sign):
    eps = sign * 10**-2.5
    d_grid = [0.5 * constants.d0, constants.d0, 2.0 * constants.d0]
    samples = expansion_check(gs, v0, constants, [eps], d_grid, ball)
    at_d0 = samples[1]
    assert abs(at_d0.upsilon_measured - at_d0.upsilon_predicted) \
        / abs(at_d0.upsilon_predicted) < 0.05
    scale = abs(at_d0.upsilon_predicted)
    for s in samples:
        assert abs(s.upsilon_measured - s.upsilon_predicted) \
            / max(abs(s.upsilon_predicted), 0.1 * scale) < 0.10


def test_expansion_argmax_converges_to_d0(gs, v0, constants, ball, sign):
    d_grid = list(np.geomspace(constants.d0 / 2, 2 * constants.d0, 9))
    argmaxes = []
    for mag in (1e-2, 10**-2.5):
        samples = expansion_check(gs, v0, constants, [sign * mag], d_grid, ball)
        best = max(samples, key=lambda s: s.upsilon_measured)
        argmaxes.append(best.d)
    step = d_grid[1] / d_grid[0]
    assert constants.d0 / step <= argmaxes[-1] <= constants.d0 * step


def test_expansion_cubic_coefficient(gs, v0, constants, ball, sign):
    """The cubic-in-d coefficient of the measured energy is -a3 within 10%."""
    eps = sign * 10**-2.5
    d_grid = list(np.geomspace(constants.d0 / 2, 3 * constants.d0, 11))
    samples = expansion_check(gs, v0, constants, [eps], d_grid, ball)
    ds = np.array([s.d for s in samples])
    ys = np.array([s.upsilon_measured for s in samples])
    coef = np.polyfit(ds, ys, 3)
    assert coef[0] == pytest.approx(-constants.a3, rel=0.10)


def test_expansion_rejects_wrong_sign(gs, v0, constants, ball, sign):
    with pytest.raises(ValueError):
        expansion_check(gs, v0, constants, [-sign * 1e-2], [constants.d0], ball)


def test_c0_is_d_independent(gs, v0, constants, ball, sign):
    eps = sign * 1e-2
    c0s = [energy_c0(assemble_ansatz(gs, v0, eps, d, ball))
           for d in (0.5 * constants.d0, constants.d0, 2 * constants.d0)]
    assert max(c0s) - min(c0s) < 1e-9 * max(1.0, abs(c0s[0]))


# -- the I-term audit ----------------------------------------------------------


def test_identity_gap_is_solver_level(gs, v0, constants, ball, sign):
    audit = i_term_audit(gs, v0, sign * 1e-2, constants.d0, ball)
    assert abs(audit["identity_gap"]) < 1e-9


def test_i4_matches_display(gs, v0, constants, ball, sign):
    for mag in (1e-2, 1e-3):
        audit = i_term_audit(gs, v0, sign * mag, constants.d0, ball, c=constants)
        assert audit["I4_over_eps3d2"] == pytest.approx(audit["I4_reference"], rel=0.05)


def test_i5_matches_region_constant(gs, v0, constants, ball, sign):
    for mag in (1e-2, 1e-3):
        audit = i_term_audit(gs, v0, sign * mag, constants.d0, ball, c=constants)
        assert audit["I5_over_abs_eps3d3"] == pytest.approx(audit["I5_reference"], rel=0.10)


def test_i6_i7_orders(gs, v0, constants, ball, sign):
    mags = np.array([10**-1.5, 10**-2, 10**-2.5, 10**-3])
    i6 = []
    i7 = []
    for mag in mags:
        audit = i_term_audit(gs, v0, sign * mag, constants.d0, ball)
        i6.append(abs(audit["I6"]))
        i7.append(abs(audit["I7"]))
    order6 = np.polyfit(np.log(mags), np.log(i6), 1)[0]
    order7 = np.polyfit(np.log(mags), np.log(i7), 1)[0]
    assert order6 >= 3.9
    assert order7 >= 3.9


def test_i7_bound(gs, v0, constants, ball, sign):
    """|I7| = eps^2 |int v0 PU| <= C eps^2 delta^2 (measured C ~ 3e2)."""
    for mag in (1e-2, 1e-3):
        audit = i_term_audit(gs, v0, sign * mag, constants.d0, ball)
        delta = audit["delta"]
        assert abs(audit["I7"]) <= 1000.0 * mag**2 * delta**2
