"""Radial solvers against independent oracles: series-evaluated Bessel zeros,
Pohozaev balances, Fredholm identities, and cross-discretization agreement."""

import math

import numpy as np
import pytest
from scipy.special import jn_zeros

from bn6.bubbles import DomainBall
from bn6.errors import (
    ConvergenceFailure,
    DegenerateLinearization,
    NodeCountMismatch,
    NoSolutionInRange,
    ResolutionError,
)
from bn6.profiles import RadialProfile
from bn6.quadrature import graded_mesh
from bn6.radial import (
    collocation_solve,
    first_eigenvalue,
    pohozaev_imbalance,
    sector_eigenvalues,
    sector_eigenvalues_potential,
    solve_linear_radial,
    solve_positive,
    solve_sign_changing,
    solve_v0,
    uniform_nodes,
)


# -- independent Bessel oracle ------------------------------------------------


def _j2_series(x: float) -> float:
    """J_2 by its power series (converges fast for x < 20)."""
    total = 0.0
    term = (x / 2.0) ** 2 / 2.0  # k = 0 term: (x/2)^2 / (0! 2!)
    k = 0
    while abs(term) > 1e-18 * max(1.0, abs(total)) and k < 80:
        total += term
        k += 1
        term *= -((x / 2.0) ** 2) / (k * (k + 2))
    return total


def _j2_first_zero_by_bisection() -> float:
    lo, hi = 4.0, 6.0
    assert _j2_series(lo) > 0 > _j2_series(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _j2_series(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_first_eigenvalue_against_series_oracle(ball):
    oracle = _j2_first_zero_by_bisection() ** 2
    assert oracle == pytest.approx(26.374616427, abs=1e-6)
    assert first_eigenvalue(ball) == pytest.approx(oracle, abs=1e-9)


def test_first_eigenvalue_scaling():
    assert first_eigenvalue(DomainBall(2.0)) == pytest.approx(
        first_eigenvalue(DomainBall(1.0)) / 4.0, rel=1e-14
    )


def test_eigen_solver_matches_first_eigenvalue(ball):
    spec = sector_eigenvalues_potential(None, ball, 0, 1, n=4096)
    assert spec.eigenvalues[0] == pytest.approx(first_eigenvalue(ball), abs=1e-8)


# -- positive solutions -------------------------------------------------------


def test_no_solution_outside_range(ball):
    with pytest.raises(NoSolutionInRange):
        solve_positive(0.0, ball)
    with pytest.raises(NoSolutionInRange):
        solve_positive(-1.0, ball)
    with pytest.raises(NoSolutionInRange):
        solve_positive(1.01 * first_eigenvalue(ball), ball)


def test_ground_state_height_monotone(ball):
    lam1 = first_eigenvalue(ball)
    h_small = solve_positive(0.05 * lam1, ball, n=1024).max_value
    h_mid = solve_positive(0.5 * lam1, ball, n=1024).max_value
    h_near1 = solve_positive(0.95 * lam1, ball, n=1024).max_value
    h_nearer1 = solve_positive(0.99 * lam1, ball, n=1024).max_value
    assert h_small > h_mid > h_near1 > h_nearer1
    assert h_nearer1 < 0.25 * h_near1  # height vanishes linearly toward lambda1


def test_ground_state_contracts(gs):
    assert gs.shooting_residual < 1e-9
    assert gs.profile.validate_bc(1e-9)
    assert np.all(gs.profile.values[:-1] > 0.0)
    assert gs.profile.values[0] == gs.max_value
    assert gs.profile.node_count() == 0


def test_bracket_failure_when_height_below_sweep(ball):
    """Extremely close to lambda1 the ground-state height drops below the
    sweep floor and the solver must report the lost bracket."""
    from bn6.errors import BracketFailure

    lam = 0.9999999 * first_eigenvalue(ball)
    with pytest.raises(BracketFailure):
        solve_positive(lam, ball, n=512)


def test_ground_state_grid_convergence(ball):
    """u0(0) converges under refinement at measured order >= 1.9."""
    lam = 15.0
    heights = [solve_positive(lam, ball, tol=1e-12, n=n).max_value
               for n in (128, 256, 512, 1024)]
    errs = [abs(h - heights[-1]) for h in heights[:-1]]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    assert min(orders) >= 1.9


def test_ground_state_pohozaev(gs):
    assert pohozaev_imbalance(gs.profile, gs.lam) < 1e-8


def test_morse_index_one_in_radial_class(gs, bundle):
    spec0 = bundle.spectra[0]
    assert spec0.negative_count == 1


def test_shooting_collocation_agreement(ball, gs):
    """Shooting vs bordered-Newton collocation on the positive branch."""
    nodes = graded_mesh(0.05, ball.radius, per_decade=256)
    init = RadialProfile(nodes, gs.profile(nodes) * 1.02,
                         gs.profile.derivative(nodes) * 1.02)
    colloc = collocation_solve(gs.lam, init, ball, tol=1e-11)
    # collocation is second order; estimate its error by grid doubling
    nodes2 = graded_mesh(0.05, ball.radius, per_decade=512)
    init2 = RadialProfile(nodes2, gs.profile(nodes2), gs.profile.derivative(nodes2))
    colloc2 = collocation_solve(gs.lam, init2, ball, tol=1e-11)
    est = abs(colloc.values[0] - colloc2.values[0])
    gap = abs(colloc.values[0] - gs.max_value)
    assert gap <= 10.0 * max(est, 1e-9)


# -- v0 -----------------------------------------------------------------------


def test_v0_zero_forcing_gives_zero(gs):
    q, _ = gs.potential_arrays()
    prof = solve_linear_radial(q, np.zeros_like(q), gs.profile.nodes)
    assert np.max(np.abs(prof.values)) == 0.0


def test_v0_linearity(gs, ball):
    q, _ = gs.potential_arrays()
    v1 = solve_linear_radial(q, gs.profile.values, gs.profile.nodes)
    v2 = solve_linear_radial(q, 2.0 * gs.profile.values, gs.profile.nodes)
    assert np.max(np.abs(v2.values - 2.0 * v1.values)) < 1e-10 * np.max(np.abs(v1.values))


def test_v0_discrete_defect_against_independent_assembly(gs, v0):
    """Re-assemble the second-order stencil independently.

    The defect must stay below 1e-8 relative to the forcing's max norm
    (extended precision keeps the oracle's own 1/h^2 evaluation roundoff out
    of the measurement; the absolute defect has an eps/h^2 quantization
    floor near 2e-8 at this resolution).
    """
    nodes = gs.profile.nodes.astype(np.longdouble)
    h = nodes[1] - nodes[0]
    q = 2.0 * np.abs(gs.profile.values.astype(np.longdouble)) + np.longdouble(gs.lam)
    v = v0.values.astype(np.longdouble)
    u0 = gs.profile.values.astype(np.longdouble)
    i = np.arange(1, len(nodes) - 1)
    defect = ((v[i - 1] - 2 * v[i] + v[i + 1]) / h**2
              + 5.0 / nodes[i] * (v[i + 1] - v[i - 1]) / (2 * h)
              + q[i] * v[i] + u0[i])
    center = 12.0 * (v[1] - v[0]) / h**2 + q[0] * v[0] + u0[0]
    scale = float(np.max(np.abs(u0)))
    assert abs(float(center)) < 1e-8 * scale
    assert float(np.max(np.abs(defect))) < 1e-8 * scale


def test_v0_fredholm_identity(gs, v0):
    """<v0, u0^2> = -<u0, u0> follows from the defining equations."""
    nodes = gs.profile.nodes
    w = nodes**5
    u0 = gs.profile.values
    lhs = np.trapezoid(v0.values * u0**2 * w, nodes)
    rhs = -np.trapezoid(u0**2 * w, nodes)
    assert lhs == pytest.approx(rhs, rel=2e-5)


def test_v0_boundary_conditions(v0):
    assert v0.validate_bc(1e-9)


def test_v0_cross_check_against_shooting(gs, v0, ball):
    """Superposition shooting (4th order) agrees at the FD error level."""
    from bn6 import kernels

    q, qp = gs.potential_arrays()
    nodes = gs.profile.nodes
    h = nodes[1] - nodes[0]
    f = gs.profile.values
    fp = gs.profile.derivs
    w0, _ = kernels.linear_shoot_l0(q, qp, f, fp, h, 0.0, 0.0)
    hom, _ = kernels.linear_shoot_l0(q, qp, np.zeros_like(f), np.zeros_like(f), h, 0.0, 1.0)
    s_star = -w0[-1] / hom[-1]
    v_shoot = w0 + s_star * hom
    assert np.max(np.abs(v_shoot - v0.values)) < 5e-5


def test_degenerate_linearization_detected(gs, ball):
    """Shifting the potential to put an eigenvalue at zero must be refused."""
    spec0 = sector_eigenvalues(gs, 0, 1)
    mu1 = spec0.eigenvalues[0]
    shifted = GroundStateShim(gs, mu1)
    with pytest.raises(DegenerateLinearization):
        solve_v0(shifted, ball, tol_eig=1e-6)


class GroundStateShim:
    """A gs whose linearization potential is shifted by a constant."""

    def __init__(self, gs, shift):
        self._gs = gs
        self.profile = gs.profile
        self.lam = gs.lam + shift
        self.max_value = gs.max_value

    def potential_arrays(self):
        q, qp = self._gs.potential_arrays()
        return q + (self.lam - self._gs.lam), qp


# -- sector eigenvalues ------------------------------------------------------


def test_free_sector_eigenvalues_match_bessel(ball):
    for ell, order in ((0, 2), (1, 3), (2, 4)):
        spec = sector_eigenvalues_potential(None, ball, ell, 3, n=2048)
        ref = (jn_zeros(order, 3)) ** 2
        assert np.allclose(spec.eigenvalues, ref, rtol=1e-8)


def test_sector_monotonicity(bundle):
    mu1 = [spec.eigenvalues[0] for spec in bundle.spectra]
    assert all(mu1[i] < mu1[i + 1] for i in range(len(mu1) - 1))


def test_sector_eigenvalues_increasing_within_sector(bundle):
    for spec in bundle.spectra:
        eigs = spec.eigenvalues
        assert all(eigs[i] < eigs[i + 1] for i in range(len(eigs) - 1))


def test_nondegeneracy_across_sectors(bundle):
    assert bundle.report.nondegenerate
    assert bundle.report.min_abs_eigenvalue > 1e-6


def test_resolution_error_on_absurd_count(gs):
    with pytest.raises(ResolutionError):
        sector_eigenvalues(gs, 0, 10_000)


# -- sign-changing collocation -----------------------------------------------


def test_positive_init_rejected_as_sign_changing(ball, gs):
    nodes = graded_mesh(0.05, ball.radius, per_decade=192)
    init = RadialProfile(nodes, gs.profile(nodes), gs.profile.derivative(nodes))
    with pytest.raises(NodeCountMismatch):
        solve_sign_changing(gs.lam, init, ball, tol=1e-11)


def test_collocation_idempotent_from_own_solution(ball, gs):
    nodes = graded_mesh(0.05, ball.radius, per_decade=192)
    init = RadialProfile(nodes, gs.profile(nodes), gs.profile.derivative(nodes))
    first = collocation_solve(gs.lam, init, ball, tol=1e-11)
    again = collocation_solve(gs.lam, first, ball, tol=1e-11)
    assert again.meta["newton_iterations"] <= 2
    assert np.max(np.abs(again.values - first.values)) < 1e-9


def test_collocation_continuation_self_consistency(ball, gs):
    """From a converged neighbor's solution, the bordered Newton reconverges
    in <= 5 outer steps (each a damped-Newton polish of the pinned system)."""
    nodes = graded_mesh(0.05, ball.radius, per_decade=192)
    init = RadialProfile(nodes, gs.profile(nodes), gs.profile.derivative(nodes))
    at_lam = collocation_solve(gs.lam, init, ball, tol=1e-11)
    neighbor = collocation_solve(gs.lam + 0.02, at_lam, ball, tol=1e-11)
    assert neighbor.meta["newton_outer_iterations"] <= 5
    assert abs(neighbor.values[0] - at_lam.values[0]) < 0.1


def test_collocation_convergence_failure_reported(ball):
    nodes = graded_mesh(0.05, ball.radius, per_decade=64)
    wild = RadialProfile(nodes, 1e6 * np.sin(40 * nodes), np.zeros_like(nodes))
    with pytest.raises(ConvergenceFailure) as err:
        collocation_solve(5.0, wild, ball, tol=1e-13, max_outer=2)
    assert err.value.iterate is not None


def test_plain_full_system_newton_on_mild_profile(ball, gs):
    """Away from the blow-up regime the unbordered damped Newton works too."""
    from bn6.radial import newton_collocate

    nodes = graded_mesh(0.05, ball.radius, per_decade=128)
    init_vals = gs.profile(nodes) * 1.01
    u, res, iters, history, stalled = newton_collocate(
        init_vals, nodes, gs.lam, tol=1e-8, max_iter=60
    )
    assert not stalled
    assert res < 1e-5  # stencil roundoff floor; see _floor_estimate
    # second-order discretization offset at this mesh density is ~3e-3
    assert abs(u[0] - gs.max_value) < 1e-2


def test_pohozaev_certifies_nonexistence_direction(ball):
    """The balance lam*int u^2 = R^6 u'(R)^2/2 fails badly for a fake profile."""
    nodes = uniform_nodes(1.0, 256)
    fake = RadialProfile(nodes, np.cos(np.pi * nodes / 2),
                         -np.pi / 2 * np.sin(np.pi * nodes / 2))
    assert pohozaev_imbalance(fake, -1.0) > 0.5
