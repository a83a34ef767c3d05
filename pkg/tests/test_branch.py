"""Branch continuation and the blow-up rate fit.

The branch is solved once per session (it is the most expensive fixture);
individual tests then interrogate the accepted points, the fit, synthetic
inversions, and the recorded failure modes."""

import math

import numpy as np
import pytest

from bn6.branch import (
    BranchPoint,
    continue_branch,
    extract_delta,
    fit_blowup_rate,
    seed_branch,
    shoot_sign_changing,
)
from bn6.critical import admissible_eps_sign
from bn6.errors import FitError, NotBlownUp, SeedFailure
from bn6.expansion import assemble_ansatz
from bn6.profiles import RadialProfile
from bn6.radial import pohozaev_imbalance


@pytest.fixture(scope="session")
def branch(gs, v0, constants, ball):
    sign = admissible_eps_sign(constants)
    start = seed_branch(gs, v0, constants, ball, sign * 2.0e-2)
    mags = np.geomspace(2.0e-2, 1.5e-3, 9)
    targets = [sign * float(m) for m in mags[1:]]
    return continue_branch(start, targets, gs, v0, constants, ball)


def test_seed_accepted(branch, constants, v0, ball):
    start = branch[0]
    assert start.node_count == 1
    assert start.newton_residual < 1e-9
    # the remainder is far below the eps*v0 correction in the H1 seminorm
    from bn6.bubbles import omega6
    from bn6.quadrature import gauss_panels

    pts, wts = gauss_panels(v0.nodes, 8)
    v0_h1 = math.sqrt(omega6() * float(np.dot(v0.derivative(pts) ** 2 * pts**5, wts)))
    assert start.phi_norm_proxy < 0.25 * abs(start.eps) * v0_h1


def test_branch_all_single_node(branch):
    assert all(p.node_count == 1 for p in branch)


def test_branch_lambda_consistency(branch, bundle):
    for p in branch:
        assert p.lam == pytest.approx(bundle.lambda0 + p.eps, abs=1e-12)


def test_branch_ordering_and_uniqueness(branch):
    mags = [abs(p.eps) for p in branch]
    assert mags == sorted(mags, reverse=True)
    assert len(set(mags)) == len(mags)
    lams = [p.lam for p in branch]
    assert lams == sorted(lams)  # negative-eps branch: lambda increases as eps -> 0


def test_branch_pohozaev_audit(branch):
    for p in branch:
        assert p.meta["pohozaev"] < 1e-6


def test_branch_delta_monotone(branch):
    deltas = [p.delta_extracted for p in branch]
    assert all(deltas[i] > deltas[i + 1] for i in range(len(deltas) - 1))


def test_fit_blowup_rate(branch, constants):
    fit = fit_blowup_rate(branch, constants)
    assert fit.r_squared > 0.99
    assert fit.relative_gap < 0.15
    assert fit.d0_predicted == constants.d0
    assert fit.eps_range[1] / fit.eps_range[0] >= 10.0


def test_remainder_proxy_order(branch):
    """||u_eps - W|| decays like eps^2 (log factor within the slope window)."""
    x = np.log([abs(p.eps) for p in branch])
    y = np.log([p.phi_norm_proxy for p in branch])
    slope = float(np.polyfit(x, y, 1)[0])
    assert slope >= 1.8


def test_branch_far_field_converges_to_u0(branch, gs):
    """sup_{r >= 0.5} |u_eps - u0| -> 0 at measured order >= 0.9 in |eps|."""
    r = np.linspace(0.5, 1.0, 200)
    gaps = []
    for p in branch:
        gaps.append(np.max(np.abs(p.profile(r) - gs.profile(r))))
    x = np.log([abs(p.eps) for p in branch])
    slope = float(np.polyfit(x, np.log(gaps), 1)[0])
    assert slope >= 0.9


def test_extract_delta_on_synthetic_ansatz(gs, v0, constants, ball):
    """Inverting the central value on an exact W recovers |eps| d."""
    sign = admissible_eps_sign(constants)
    eps = sign * 1e-2
    b = assemble_ansatz(gs, v0, eps, constants.d0, ball)
    delta = extract_delta(b.w, gs)
    assert abs(delta - b.delta) <= abs(eps) * b.delta


def test_extract_delta_second_order_robustness(gs, v0, constants, ball):
    """Adding the eps v0(0) correction to the inversion shifts delta by O(eps)."""
    sign = admissible_eps_sign(constants)
    eps = sign * 1e-2
    b = assemble_ansatz(gs, v0, eps, constants.d0, ball)
    umin = float(np.min(b.w.values))
    plain = math.sqrt(24.0 / (gs.max_value - umin))
    corrected = math.sqrt(24.0 / (gs.max_value + eps * v0.values[0] - umin))
    assert abs(corrected - plain) / plain < abs(eps)


def test_extract_delta_rejects_positive_profile(gs):
    with pytest.raises(NotBlownUp):
        extract_delta(gs.profile, gs)


def test_delta_extraction_grid_invariance(branch, gs, v0, constants, ball):
    """Re-solving one point at doubled mesh density moves delta by < 1%."""
    p = branch[2]
    got = shoot_sign_changing(p.lam, p.eps, p.delta_extracted, gs, v0, ball,
                              span=1.3, n_sweep=17, mesh_scale=2.0)
    assert got is not None
    _, prof = got
    delta2 = extract_delta(prof, gs)
    assert abs(delta2 - p.delta_extracted) / p.delta_extracted < 0.01


def test_continue_with_own_target_returns_start(branch, gs, v0, constants, ball):
    start = branch[0]
    out = continue_branch(start, [start.eps], gs, v0, constants, ball)
    assert out == [start]


def test_wrong_sign_seed_recorded(gs, v0, constants, ball):
    """The forbidden eps sign must fail loudly, not silently succeed."""
    sign = admissible_eps_sign(constants)
    with pytest.raises(SeedFailure):
        seed_branch(gs, v0, constants, ball, -sign * 1e-2)


def test_fit_identity_on_synthetic_branch(constants, gs):
    nodes = np.linspace(0.0, 1.0, 11)
    pts = []
    for mag in np.geomspace(1e-2, 1e-3, 5):
        prof = RadialProfile(nodes, np.zeros_like(nodes), np.zeros_like(nodes))
        pts.append(BranchPoint(eps=-mag, lam=0.0, profile=prof,
                               delta_extracted=0.7 * mag, node_count=1,
                               newton_residual=0.0, phi_norm_proxy=1.0))
    fit = fit_blowup_rate(pts, constants)
    assert fit.d_fitted == pytest.approx(0.7, rel=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(0.0, abs=1e-12)


def test_fit_requires_enough_points(constants):
    with pytest.raises(FitError):
        fit_blowup_rate([], constants)


def test_fit_requires_a_decade(constants):
    nodes = np.linspace(0.0, 1.0, 5)
    prof = RadialProfile(nodes, np.zeros(5), np.zeros(5))
    pts = [BranchPoint(eps=-m, lam=0.0, profile=prof, delta_extracted=0.7 * m,
                       node_count=1, newton_residual=0.0, phi_norm_proxy=1.0)
           for m in (1e-2, 0.9e-2, 0.8e-2, 0.7e-2)]
    with pytest.raises(FitError):
        fit_blowup_rate(pts, constants)


def test_branch_solutions_are_discrete_solutions(branch):
    """Boundary residual and Pohozaev both at solver level at every point."""
    for p in branch:
        assert p.newton_residual < 1e-8
        assert pohozaev_imbalance(p.profile, p.lam) < 1e-6


def test_branch_stall_carries_partial_results(branch, gs, v0, constants, ball,
                                              monkeypatch):
    """When every step fails, halving exhausts and the prefix is attached."""
    import bn6.branch as branch_mod

    monkeypatch.setattr(branch_mod, "shoot_sign_changing",
                        lambda *args, **kwargs: None)
    from bn6.errors import BranchStall

    start = branch[0]
    with pytest.raises(BranchStall) as err:
        continue_branch(start, [start.eps / 10.0], gs, v0, constants, ball,
                        max_halvings=3)
    assert err.value.points == [start]
