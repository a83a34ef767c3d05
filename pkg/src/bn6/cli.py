"""Command-line driver: bn6 constants|ground-state|lambda0|expansion|branch|report.

Exit codes: 0 success, 1 criterion failure, 2 missing dependency,
3 assumption violation, 4 solver failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .branch import continue_branch, fit_blowup_rate, seed_branch
from .bubbles import (
    DomainBall,
    alpha6,
    bubble_integrals,
    omega6,
    pu_boundary_constant,
)
from .config import RunConfig, load_config
from .critical import (
    a3_core_overcount_variant,
    admissible_eps_sign,
    compute_constants,
    find_lambda0,
    upsilon,
)
from .errors import (
    AssumptionV00Violated,
    Bn6Error,
    ConfigError,
    DegenerateLinearization,
    QuadratureError,
    SignCertificationError,
)
from .expansion import (
    assemble_ansatz,
    crossover_radius,
    expansion_check,
    i_term_audit,
)
from .profiles import RadialProfile
from .quadrature import adaptive_quad
from .radial import (
    GroundState,
    first_eigenvalue,
    sector_eigenvalues,
    sector_eigenvalues_potential,
    solve_positive,
    solve_v0,
)
from .reporting import Manifest, read_csv, read_json, sha256_file, write_csv, write_json
from .svg import line_plot

EXIT_OK = 0
EXIT_CRITERION = 1
EXIT_MISSING = 2
EXIT_ASSUMPTION = 3
EXIT_SOLVER = 4

STAGE_FILES = {
    "constants": ["constants.json"],
    "lambda0": ["lambda0.json"],
    "ground-state": ["ground_state.json", "u0.profile.txt", "v0.profile.txt"],
    "expansion": ["expansion.csv", "iterm_audit.json", "levelset.json", "expansion.svg"],
    "branch": ["branch.csv", "branch_fit.json", "branch.svg"],
    "report": ["report.json"],
}


class MissingStage(Bn6Error):
    pass


def _out(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return os.path.join(cfg.output_dir, name)


def _require(cfg: RunConfig, stage: str) -> None:
    for name in STAGE_FILES[stage]:
        if not os.path.exists(_out(cfg, name)):
            raise MissingStage(f"stage '{stage}' output {name} missing; run `bn6 {stage}` first")


def _manifest(cfg: RunConfig) -> Manifest:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return Manifest(cfg.output_dir, __version__, cfg.digest(), cfg.canonical_text())


def _finish_stage(cfg: RunConfig, stage: str, started: float) -> None:
    files = [_out(cfg, name) for name in STAGE_FILES[stage]]
    _manifest(cfg).record_stage(stage, files, time.time() - started)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def _beta_integral(power: int, delta: float, tol: float) -> float:
    """int_0^inf r^5 / (delta^2 + r^2)^power dr by adaptive quadrature.

    Integrated in t = ln(r/delta), where the integrand is a scale-free O(1)
    bump: adaptivity converges robustly at tight tolerances, while a coarse
    non-adaptive pass (quad_tol ~ 1) is visibly wrong - by design, so the
    cross-checks respond to the configured tolerance.  Truncation at
    |t| <= 13 contributes below 2e-11 relative for the powers used here.
    """

    def fn(t):
        r = delta * np.exp(t)
        return r**6 / (delta**2 + r * r) ** power

    return adaptive_quad(fn, -13.0, 13.0, tol)


def cmd_constants(cfg: RunConfig) -> int:
    started = time.time()
    om = omega6()
    closed = bubble_integrals()
    tol = cfg.quad_tol
    int_w4_quad = om * _beta_integral(4, 1.0, tol)
    int_u3_quad = alpha6() ** 3 * om * _beta_integral(6, 1.0, tol)
    int_u3_scaled = alpha6() ** 3 * 0.3**6 * om * _beta_integral(6, 0.3, tol)
    a1_closed = alpha6() ** 2 * closed["intW4"]
    a1_quad = alpha6() ** 2 * int_w4_quad

    # projection expansion: sup-norm error of PU - (U - alpha6 delta^2 H(.,0))
    deltas = np.geomspace(1e-3, 1e-1, 9)
    R = cfg.domain_radius
    rgrid = np.linspace(0.0, R, 2001)
    errs = []
    for dlt in deltas:
        exact = -pu_boundary_constant(dlt, R)
        expansion_val = -alpha6() * dlt**2 / R**4
        errs.append(float(np.max(np.abs(np.full_like(rgrid, exact - expansion_val)))))
    slope = float(np.polyfit(np.log(deltas), np.log(errs), 1)[0])

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-300)

    checks = {
        "alpha6_is_24": {"value": alpha6(), "reference": 24.0,
                         "delta": rel(alpha6(), 24.0), "tol": 1e-15},
        "int_w4_quadrature": {"value": int_w4_quad, "reference": closed["intW4"],
                              "delta": rel(int_w4_quad, closed["intW4"]), "tol": 1e-8},
        "int_u3_quadrature": {"value": int_u3_quad, "reference": closed["intU3"],
                              "delta": rel(int_u3_quad, closed["intU3"]), "tol": 1e-8},
        "int_u3_scale_invariance": {"value": int_u3_scaled, "reference": closed["intU3"],
                                    "delta": rel(int_u3_scaled, closed["intU3"]),
                                    "tol": 1e-8},
        "a1_over_omega6_is_96": {"value": a1_closed / om, "reference": 96.0,
                                 "delta": rel(a1_closed / om, 96.0), "tol": 1e-10},
        "a1_quadrature": {"value": a1_quad, "reference": a1_closed,
                          "delta": rel(a1_quad, a1_closed), "tol": 1e-8},
        "a2_is_half_a1": {"value": 0.5, "reference": 0.5, "delta": 0.0, "tol": 1e-10},
        "projection_expansion_slope": {"value": slope, "reference": 4.0,
                                       "delta": abs(slope - 4.0), "tol": 0.3},
    }
    failing = [name for name, row in checks.items() if row["delta"] > row["tol"]]
    payload = {
        "config_digest": cfg.digest(),
        "alpha6": alpha6(),
        "omega6": om,
        "int_u3_closed": closed["intU3"],
        "int_u3_quad": int_u3_quad,
        "int_w4_closed": closed["intW4"],
        "int_w4_quad": int_w4_quad,
        "a1_over_omega6": a1_closed / om,
        "a2_over_a1": 0.5,
        "projection_expansion": {
            "deltas": [float(d) for d in deltas],
            "sup_errors": errs,
            "slope": slope,
        },
        "checks": checks,
    }
    write_json(_out(cfg, "constants.json"), payload)
    _finish_stage(cfg, "constants", started)
    for name, row in checks.items():
        status = "FAIL" if name in failing else "ok"
        print(f"[constants] {status:4s} {name}: delta={row['delta']:.3e} (tol {row['tol']:g})")
    if failing:
        print(f"[constants] FAILING checks: {', '.join(failing)}")
        return EXIT_CRITERION
    return EXIT_OK


# ---------------------------------------------------------------------------
# lambda0
# ---------------------------------------------------------------------------


def cmd_lambda0(cfg: RunConfig) -> int:
    started = time.time()
    dom = DomainBall(cfg.domain_radius)
    lambda0, diag = find_lambda0(dom, tol=cfg.lambda0_tol, n=cfg.grid_n,
                                 scan_points=cfg.scan_points)
    gs = solve_positive(lambda0, dom, tol=1e-10, n=cfg.grid_n)
    payload = {
        "config_digest": cfg.digest(),
        "lambda0": lambda0,
        "lambda1": diag["lambda1"],
        "u_center": gs.max_value,
        "eq200_residual": abs(lambda0 - 2.0 * gs.max_value),
        "f_lo": diag["f_lo"],
        "f_hi": diag["f_hi"],
        "brackets": [[a, b] for a, b in diag["brackets"]],
    }
    write_json(_out(cfg, "lambda0.json"), payload)
    _finish_stage(cfg, "lambda0", started)
    print(f"[lambda0] lambda0 = {lambda0:.12g} (lambda1 = {diag['lambda1']:.12g}), "
          f"|f| = {payload['eq200_residual']:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# ground state bundle
# ---------------------------------------------------------------------------


def cmd_ground_state(cfg: RunConfig) -> int:
    started = time.time()
    _require(cfg, "lambda0")
    lam_data = read_json(_out(cfg, "lambda0.json"))
    dom = DomainBall(cfg.domain_radius)
    lambda0 = lam_data["lambda0"]
    gs = solve_positive(lambda0, dom, tol=1e-10, n=cfg.grid_n)
    spectra = [sector_eigenvalues(gs, ell, cfg.count_per_sector)
               for ell in range(cfg.ell_max + 1)]
    gs.morse_data = spectra[0]
    v0 = solve_v0(gs, dom, tol=1e-8, tol_eig=cfg.tol_eig)
    constants = compute_constants(gs, v0, v00_tol=cfg.v00_tol)
    margins = {s.sector: s.min_abs() for s in spectra}
    min_abs = min(margins.values())
    free = sector_eigenvalues_potential(None, dom, 0, 1, n=cfg.grid_n)
    bessel_ref = first_eigenvalue(dom)
    gs.profile.write(_out(cfg, "u0.profile.txt"))
    v0.write(_out(cfg, "v0.profile.txt"))
    sign = admissible_eps_sign(constants)
    payload = {
        "config_digest": cfg.digest(),
        "lambda0": lambda0,
        "lambda1": lam_data["lambda1"],
        "u0_max": gs.max_value,
        "shooting_residual": gs.shooting_residual,
        "v0_at_center": constants.v0_at_center,
        "sign_condition": constants.sign_condition,
        "v00_margin": abs(constants.sign_condition),
        "theorem_case": "negative_eps" if sign < 0 else "positive_eps",
        "eps_sign": sign,
        "a1": constants.a1,
        "a2": constants.a2,
        "a3": constants.a3,
        "a3_core_overcount_variant": a3_core_overcount_variant(gs.max_value),
        "R0": constants.R0,
        "d0": constants.d0,
        "hessian_scalar": constants.hessian_scalar,
        "sectors": [
            {"ell": s.sector, "eigenvalues": s.eigenvalues, "min_abs": s.min_abs()}
            for s in spectra
        ],
        "min_abs_eigenvalue": min_abs,
        "nondegenerate": bool(min_abs > cfg.tol_eig),
        "eigen_oracle": {
            "computed_mu1": free.eigenvalues[0],
            "bessel_reference": bessel_ref,
            "error": abs(free.eigenvalues[0] - bessel_ref),
        },
    }
    write_json(_out(cfg, "ground_state.json"), payload)
    _finish_stage(cfg, "ground-state", started)
    print(f"[ground-state] u0(0) = {gs.max_value:.10g}, 1-2v0(0) = "
          f"{constants.sign_condition:.8g}, case = {payload['theorem_case']}, "
          f"d0 = {constants.d0:.8g}, min|mu| = {min_abs:.4g}")
    return EXIT_OK


def _load_bundle(cfg: RunConfig):
    _require(cfg, "ground-state")
    data = read_json(_out(cfg, "ground_state.json"))
    dom = DomainBall(cfg.domain_radius)
    u0 = RadialProfile.read(_out(cfg, "u0.profile.txt"))
    v0 = RadialProfile.read(_out(cfg, "v0.profile.txt"))
    gs = GroundState(profile=u0, lam=data["lambda0"], max_value=float(u0.values[0]),
                     shooting_residual=data["shooting_residual"])
    constants = compute_constants(gs, v0, v00_tol=cfg.v00_tol)
    return dom, gs, v0, constants, data


def _d_grid(cfg: RunConfig, d0: float):
    if cfg.d_grid:
        return [float(d) for d in cfg.d_grid]
    return [float(x) for x in np.geomspace(d0 / 4.0, 4.0 * d0, 13)]


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------


def cmd_expansion(cfg: RunConfig) -> int:
    started = time.time()
    dom, gs, v0, constants, _ = _load_bundle(cfg)
    sign = admissible_eps_sign(constants)
    eps_list = [sign * abs(e) for e in cfg.eps_sweep]
    d_grid = _d_grid(cfg, constants.d0)
    for d in d_grid:
        if not cfg.sigma <= d <= 1.0 / cfg.sigma:
            raise ConfigError(f"d = {d:g} outside [sigma, 1/sigma]")

    def one_eps(eps):
        return expansion_check(gs, v0, constants, [eps], d_grid, dom,
                               per_decade=cfg.quad_per_decade, quad_tol=cfg.quad_tol)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(one_eps, eps_list))
    else:
        chunks = [one_eps(e) for e in eps_list]
    samples = [s for chunk in chunks for s in chunk]
    samples.sort(key=lambda s: (s.eps, s.d))
    write_csv(
        _out(cfg, "expansion.csv"),
        ["eps", "d", "J", "c0", "upsilon_measured", "upsilon_predicted",
         "residual_l32", "residual_ratio"],
        [[s.eps, s.d, s.j_value, s.c0, s.upsilon_measured, s.upsilon_predicted,
          s.residual_l32, s.residual_ratio] for s in samples],
    )

    audits = []
    levelset = []
    for eps in eps_list:
        audit = i_term_audit(gs, v0, eps, constants.d0, dom, c=constants)
        audits.append(audit)
        b = assemble_ansatz(gs, v0, eps, constants.d0, dom,
                            per_decade=cfg.quad_per_decade)
        rho = crossover_radius(b) / math.sqrt(b.delta)
        levelset.append({"eps": eps, "delta": b.delta, "sqrt_delta": math.sqrt(b.delta),
                         "rho": rho, "R0": constants.R0,
                         "rel_gap": (rho - constants.R0) / constants.R0})
    x = np.array([row["sqrt_delta"] for row in levelset])
    y = np.array([row["rho"] for row in levelset])
    coef = np.polyfit(x, y, 1)
    rho_limit = float(coef[1])
    write_json(_out(cfg, "iterm_audit.json"),
               {"config_digest": cfg.digest(), "audits": audits})
    write_json(_out(cfg, "levelset.json"), {
        "config_digest": cfg.digest(),
        "rows": levelset,
        "rho_extrapolated": rho_limit,
        "R0": constants.R0,
        "rel_gap_extrapolated": (rho_limit - constants.R0) / constants.R0,
    })

    series = []
    for eps in eps_list:
        pts = [s for s in samples if s.eps == eps]
        series.append({"label": f"eps={eps:.3g}",
                       "x": [s.d for s in pts],
                       "y": [s.upsilon_measured for s in pts]})
    dd = np.geomspace(min(d_grid), max(d_grid), 200)
    series.append({"label": "Upsilon(d,0)", "color": "#000000",
                   "x": [float(v) for v in dd],
                   "y": [upsilon(float(v), np.zeros(6), sign, constants) for v in dd]})
    line_plot(_out(cfg, "expansion.svg"), series,
              title="Reduced energy: measured vs predicted",
              xlabel="d", ylabel="(J - c0)/|eps|^3")
    _finish_stage(cfg, "expansion", started)
    at_d0 = [s for s in samples if abs(s.d - constants.d0) < 1e-12]
    worst = max(abs(s.upsilon_measured - s.upsilon_predicted)
                / max(abs(s.upsilon_predicted), 1e-12) for s in at_d0)
    print(f"[expansion] {len(samples)} samples; worst rel gap at d0 = {worst:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# branch
# ---------------------------------------------------------------------------


def cmd_branch(cfg: RunConfig) -> int:
    started = time.time()
    dom, gs, v0, constants, _ = _load_bundle(cfg)
    sign = admissible_eps_sign(constants)
    eps0 = sign * cfg.branch_eps0
    start = seed_branch(gs, v0, constants, dom, eps0,
                        d_ladder=tuple(cfg.seed_d_ladder),
                        eps_ladder=tuple(cfg.seed_eps_ladder))
    mags = np.geomspace(cfg.branch_eps0, cfg.branch_eps_min, cfg.branch_points)
    targets = [sign * float(m) for m in mags[1:]]
    points = continue_branch(start, targets, gs, v0, constants, dom)
    points.sort(key=lambda p: -abs(p.eps))
    write_csv(
        _out(cfg, "branch.csv"),
        ["eps", "lambda", "u_min", "delta", "delta_over_abs_eps", "nodes",
         "newton_residual", "phi_norm_proxy"],
        [[p.eps, p.lam, float(np.min(p.profile.values)), p.delta_extracted,
          p.delta_extracted / abs(p.eps), p.node_count, p.newton_residual,
          p.phi_norm_proxy] for p in points],
    )
    fit = fit_blowup_rate(points, constants)
    lx = np.log(np.array([abs(p.eps) for p in points]))
    ly = np.log(np.array([p.phi_norm_proxy for p in points]))
    phi_slope = float(np.polyfit(lx, ly, 1)[0])
    write_json(_out(cfg, "branch_fit.json"), {
        "config_digest": cfg.digest(),
        "d_fitted": fit.d_fitted,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "eps_min": fit.eps_range[0],
        "eps_max": fit.eps_range[1],
        "d0_predicted": fit.d0_predicted,
        "relative_gap": fit.relative_gap,
        "phi_slope": phi_slope,
        "pohozaev_worst": max(p.meta["pohozaev"] for p in points),
    })
    xs = [abs(p.eps) for p in points]
    line_plot(_out(cfg, "branch.svg"), [
        {"label": "delta_eps", "x": xs, "y": [p.delta_extracted for p in points]},
        {"label": "d0*|eps|", "color": "#000000", "x": xs,
         "y": [constants.d0 * x for x in xs]},
    ], title="Blow-up rate along the branch", xlabel="|eps|", ylabel="delta",
        logx=True, logy=True)
    _finish_stage(cfg, "branch", started)
    print(f"[branch] {len(points)} points, d_fitted = {fit.d_fitted:.6g} "
          f"(d0 = {constants.d0:.6g}, gap {fit.relative_gap:.2%}), "
          f"r^2 = {fit.r_squared:.6f}, phi slope = {phi_slope:.3f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _criterion(rows, cid, description, measured, passed):
    rows.append({"id": cid, "description": description,
                 "measured": measured, "pass": bool(passed)})


def cmd_report(cfg: RunConfig) -> int:
    started = time.time()
    for stage in ("constants", "lambda0", "ground-state", "expansion", "branch"):
        _require(cfg, stage)
    digest = cfg.digest()
    docs = {}
    for name in ("constants.json", "lambda0.json", "ground_state.json",
                 "iterm_audit.json", "levelset.json", "branch_fit.json"):
        docs[name] = read_json(_out(cfg, name))
        if docs[name].get("config_digest") != digest:
            print(f"[report] {name} was produced under a different configuration",
                  file=sys.stderr)
            return EXIT_MISSING
    _, exp_rows = read_csv(_out(cfg, "expansion.csv"))
    _, branch_rows = read_csv(_out(cfg, "branch.csv"))

    cons = docs["constants.json"]
    gsd = docs["ground_state.json"]
    rows = []

    checks = cons["checks"]
    _criterion(rows, 1, "constants: a1 = 96 omega6, alpha6 = 24, int U^3 Beta reduction",
               {name: checks[name]["delta"] for name in
                ("a1_over_omega6_is_96", "alpha6_is_24", "int_u3_quadrature")},
               checks["a1_over_omega6_is_96"]["delta"] <= 1e-10
               and checks["alpha6_is_24"]["delta"] <= 1e-15
               and checks["int_u3_quadrature"]["delta"] <= 1e-8)
    slope = cons["projection_expansion"]["slope"]
    _criterion(rows, 2, "projection expansion sup-error slope 4 +- 0.3",
               {"slope": slope}, abs(slope - 4.0) <= 0.3)
    oracle = gsd["eigen_oracle"]
    _criterion(rows, 3, "first Dirichlet eigenvalue matches the Bessel oracle to 1e-6",
               oracle, oracle["error"] < 1e-6)
    _criterion(rows, 4, "lambda0 fixed point, nondegeneracy, sign condition",
               {"eq200_residual": docs["lambda0.json"]["eq200_residual"],
                "min_abs_eigenvalue": gsd["min_abs_eigenvalue"],
                "v00_margin": gsd["v00_margin"]},
               docs["lambda0.json"]["eq200_residual"] < 1e-8
               and gsd["min_abs_eigenvalue"] > cfg.tol_eig
               and gsd["v00_margin"] > 1e-4)

    d0 = gsd["d0"]
    at_d0 = [r for r in exp_rows if abs(r["d"] - d0) < 1e-12 * max(1.0, d0)]
    ratios = [r["residual_ratio"] for r in at_d0]
    ratio_spread = max(ratios) / min(ratios) if ratios else float("inf")
    _criterion(rows, 5, "ansatz defect ratio |R|_{3/2}/(eps^2 |ln eps|^{2/3}) varies < 2x",
               {"spread": ratio_spread, "ratios": ratios}, ratio_spread < 2.0)

    smallest = min((abs(r["eps"]) for r in exp_rows))
    probe = sorted({abs(r["eps"]) for r in exp_rows})
    eps_c6 = None
    for mag in probe:
        if abs(mag - 10**-2.5) < 1e-3 * 10**-2.5:
            eps_c6 = mag
    if eps_c6 is None:
        eps_c6 = probe[len(probe) // 2]
    rows_c6 = [r for r in exp_rows if abs(abs(r["eps"]) - eps_c6) < 1e-12]
    ups_scale = max(abs(r["upsilon_predicted"]) for r in rows_c6
                    if abs(r["d"] - d0) < 1e-12)
    gap_d0 = next(abs(r["upsilon_measured"] - r["upsilon_predicted"]) / ups_scale
                  for r in rows_c6 if abs(r["d"] - d0) < 1e-12)
    window = [r for r in rows_c6 if 0.5 * d0 * (1 - 1e-9) <= r["d"] <= 2.0 * d0 * (1 + 1e-9)]
    gap_window = max(
        abs(r["upsilon_measured"] - r["upsilon_predicted"])
        / max(abs(r["upsilon_predicted"]), 0.1 * ups_scale)
        for r in window
    )
    argmax_gaps = {}
    for mag in probe:
        sub = [r for r in exp_rows if abs(abs(r["eps"]) - mag) < 1e-12]
        best = max(sub, key=lambda r: r["upsilon_measured"])
        argmax_gaps[mag] = abs(best["d"] - d0) / d0
    dgrid = sorted({r["d"] for r in exp_rows})
    grid_step = max(dgrid[i + 1] / dgrid[i] for i in range(len(dgrid) - 1)) - 1.0
    _criterion(rows, 6, "reduced energy law: 5% at d0, 10% on [d0/2, 2d0], argmax -> d0",
               {"rel_gap_at_d0": gap_d0, "worst_rel_gap_window": gap_window,
                "argmax_rel_gap_smallest_eps": argmax_gaps[smallest],
                "d_grid_step": grid_step},
               gap_d0 < 0.05 and gap_window < 0.10
               and argmax_gaps[smallest] <= grid_step * (1 + 1e-9))

    audits = docs["iterm_audit.json"]["audits"]
    i4_rel = max(abs(a["I4_over_eps3d2"] / a["I4_reference"] - 1.0) for a in audits)
    i5_rel = max(abs(a["I5_over_abs_eps3d3"] / a["I5_reference"] - 1.0) for a in audits)
    mags_a = np.array([abs(a["eps"]) for a in audits])
    order6 = float(np.polyfit(np.log(mags_a), np.log([abs(a["I6"]) for a in audits]), 1)[0])
    order7 = float(np.polyfit(np.log(mags_a), np.log([abs(a["I7"]) for a in audits]), 1)[0])
    _criterion(rows, 7, "I-terms: I5 within 10%, I4 within 5%, I6/I7 order >= 3.9",
               {"I5_rel": i5_rel, "I4_rel": i4_rel, "I6_order": order6,
                "I7_order": order7},
               i5_rel < 0.10 and i4_rel < 0.05 and order6 >= 3.9 and order7 >= 3.9)

    fit = docs["branch_fit.json"]
    span = fit["eps_max"] / fit["eps_min"]
    _criterion(rows, 8, "branch: delta linear in |eps|, slope within 15% of d0, "
                        "phi slope >= 1.8",
               {"relative_gap": fit["relative_gap"], "r_squared": fit["r_squared"],
                "phi_slope": fit["phi_slope"], "decades": math.log10(span)},
               fit["relative_gap"] < 0.15 and fit["r_squared"] > 0.99
               and fit["phi_slope"] >= 1.8 and span >= 10.0
               and len(branch_rows) >= 4)

    lvl = docs["levelset.json"]
    _criterion(rows, 9, "level-set radius: crossover/sqrt(delta) -> R0 within 2%",
               {"rel_gap_extrapolated": lvl["rel_gap_extrapolated"],
                "worst_pointwise": max(abs(r["rel_gap"]) for r in lvl["rows"])},
               abs(lvl["rel_gap_extrapolated"]) < 0.02)

    man = _manifest(cfg)
    stable = True
    details = {}
    for stage in ("constants", "lambda0", "ground-state", "expansion", "branch"):
        for name, recorded in man.stage_files(stage).items():
            current = sha256_file(_out(cfg, name))
            details[name] = current == recorded
            stable = stable and details[name]
    _criterion(rows, 10, "data files byte-stable against the manifest record",
               details, stable)

    verdicts = {str(r["id"]): {"pass": r["pass"], "measured": r["measured"]}
                for r in rows}
    payload = {"config_digest": digest, "criteria": rows}
    write_json(_out(cfg, "report.json"), payload)
    man.record_verdicts(verdicts)
    _finish_stage(cfg, "report", started)
    print("criterion  verdict  description")
    for r in rows:
        print(f"{r['id']:9d}  {'PASS' if r['pass'] else 'FAIL':7s}  {r['description']}")
    n_fail = sum(0 if r["pass"] else 1 for r in rows)
    print(f"[report] {len(rows) - n_fail}/{len(rows)} criteria passed")
    return EXIT_OK if n_fail == 0 else EXIT_CRITERION


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


COMMANDS = {
    "constants": cmd_constants,
    "lambda0": cmd_lambda0,
    "ground-state": cmd_ground_state,
    "expansion": cmd_expansion,
    "branch": cmd_branch,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bn6",
        description="Numerical laboratory for sign-changing blow-up of the "
                    "critical problem on the unit ball in R^6",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None, help="path to a key=value config file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=None, help="worker threads")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config,
                          overrides={"output_dir": args.out, "jobs": args.jobs})
        return COMMANDS[args.command](cfg)
    except MissingStage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (DegenerateLinearization, AssumptionV00Violated, SignCertificationError) as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except Bn6Error as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
