//! Self-contained acceptance suite: twelve numbered checks covering branch
//! structure, spectra, force extraction, continuation, deflection direction,
//! dynamics, and output determinism. Each check reports pass/fail with a
//! short numeric detail string; the suite as a whole is deterministic and
//! its serialized form is byte-compared across two runs.

use crate::deflection;
use crate::dynamics::{self, ModelParams};
use crate::error::Result;
use crate::fbp;
use crate::geometry::{self, catenoid_profile, solve_branches, Branch};
use crate::grid::{Grid, Profile};
use crate::quad::simpson_fn;
use crate::sar::{self, Model};
use crate::shooting;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
}

fn catch(id: usize, name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    match f() {
        Ok((passed, detail)) => CriterionResult { id, name: name.into(), passed, detail },
        Err(e) => CriterionResult {
            id,
            name: name.into(),
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn c1_critical_constants() -> Result<(bool, String)> {
    let c = geometry::solve_c_crit();
    let s = geometry::sigma_crit();
    let ok = (c - 1.19967864).abs() <= 1e-6 && (s - 1.50888).abs() <= 1e-4;
    Ok((ok, format!("c_crit = {c:.10}, sigma_crit = {s:.8}")))
}

fn c2_shooting_oracle() -> Result<(bool, String)> {
    let grid = Grid::uniform(801)?;
    let cc = geometry::solve_c_crit();
    let mut worst = 0.0f64;
    for &c in &[0.6, 1.0, cc, 2.0, 3.0] {
        let d = shooting::shoot(c, 0.0, grid).d;
        let exact = shooting::shoot_mu0_closed_form(c);
        worst = worst.max((d - exact).abs());
    }
    Ok((worst <= 1e-8, format!("max |D - closed form| = {worst:.3e}")))
}

fn c3_eigencurve_zero() -> Result<(bool, String)> {
    let grid = Grid::uniform(801)?;
    let samples = shooting::eigencurve(0.5, 2.5, 0, 41, grid)?;
    let mut changes = 0;
    for k in 1..samples.len() {
        if samples[k - 1].1.signum() != samples[k].1.signum() {
            changes += 1;
        }
    }
    let (c0, slope) = shooting::first_eigencurve_zero(0.5, 2.5, grid)?;
    let cc = geometry::solve_c_crit();
    let ok = changes == 1 && (c0 - cc).abs() <= 1e-5 && slope > 0.0;
    Ok((ok, format!("zero at c = {c0:.8} (c_crit {cc:.8}), slope {slope:.4}, sign changes {changes}")))
}

fn c4_sign_table() -> Result<(bool, String)> {
    let grid = Grid::uniform(801)?;
    let mut ok = true;
    let mut lines = Vec::new();
    for &s in &[1.6, 2.0, 3.0, 5.0] {
        let bp = solve_branches(s)?;
        let mu0_out = shooting::eigenvalue(bp.c_out, 0, grid)?;
        let mu0_in = shooting::eigenvalue(bp.c_in, 0, grid)?;
        let mu1_in = shooting::eigenvalue(bp.c_in, 1, grid)?;
        let margin = 10.0 * 1e-10;
        ok &= mu0_out.mu < -margin && mu0_in.mu > margin && mu1_in.mu < -margin;
        ok &= mu0_out.nodes == 0 && mu0_in.nodes == 0 && mu1_in.nodes == 1;
        // parity: ground state even, first excited odd
        let n = grid.n();
        let even_err = (0..n)
            .map(|i| (mu0_in.v[i] - mu0_in.v[n - 1 - i]).abs())
            .fold(0.0f64, f64::max);
        let odd_err = (0..n)
            .map(|i| (mu1_in.v[i] + mu1_in.v[n - 1 - i]).abs())
            .fold(0.0f64, f64::max);
        ok &= even_err <= 1e-6 && odd_err <= 1e-6;
        lines.push(format!(
            "s={s}: mu0(out)={:.5}, mu0(in)={:.5}, mu1(in)={:.5}",
            mu0_out.mu, mu0_in.mu, mu1_in.mu
        ));
    }
    Ok((ok, lines.join("; ")))
}

fn c5_force_consistency() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst_fine = 0.0f64;
    for &u0 in &[-0.5, 0.0, 0.5] {
        let rho = u0 + 1.0;
        let exact = 1.0 / (rho * rho * (2.0f64 / rho).ln().powi(2));
        let mut errs = Vec::new();
        for &(nz, ne) in &[(33usize, 17usize), (65, 33), (129, 65)] {
            let g = Grid::uniform(nz)?;
            let u = Profile::new_unchecked(g, vec![u0; nz]);
            let f = fbp::gfbp(&u, 2.0, ne)?;
            errs.push(f.values.iter().fold(0.0f64, |a, &v| a.max((v - exact).abs())));
        }
        let fine = errs[2];
        worst_fine = worst_fine.max(fine);
        ok &= fine <= 1e-4;
        // the log-radial map represents cylinder potentials exactly, so the
        // errors sit at rounding level and an order fit is vacuous there
        if fine > 1e-10 {
            let order = (errs[0] / errs[2]).log2() / 2.0;
            ok &= order >= 1.8;
        }
    }
    Ok((ok, format!("finest-grid error = {worst_fine:.3e} (discretely exact map)")))
}

fn linear_prediction_bound(
    sigma: f64,
    grid: Grid,
    solve: &mut dyn FnMut(f64, &Profile) -> Result<Profile>,
) -> Result<(Vec<f64>, bool)> {
    let bp = solve_branches(sigma)?;
    let u0 = catenoid_profile(bp.c_out, grid);
    let g = sar::gsar(&u0, sigma)?;
    let w = deflection::sensitivity(&u0, &g, sigma)?;
    let mut cs = Vec::new();
    for &lam in &[0.02, 0.01, 0.005] {
        let ul = solve(lam, &u0)?;
        let mut dev = 0.0f64;
        for i in 0..grid.n() {
            dev = dev.max((ul.values()[i] - u0.values()[i] - lam * w.values()[i]).abs());
        }
        cs.push(dev / (lam * lam));
    }
    let cmax = cs.iter().cloned().fold(0.0f64, f64::max);
    let cmin = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((cs.clone(), cmax / cmin <= 3.0))
}

fn c6_continuation() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();

    let g_sar = Grid::uniform(201)?;
    let curve = sar::continue_in_lambda(2.0, Branch::Outer, 0.05, 10, g_sar)?;
    for p in &curve.points {
        let r = sar::residual(&p.profile, 2.0, p.lambda)?;
        ok &= sar::max_abs(&r) <= 1e-10;
        ok &= p.profile.symmetry_error() <= 1e-7;
    }
    let (cs, stable) = linear_prediction_bound(2.0, g_sar, &mut |lam, init| {
        sar::solve_stationary(2.0, lam, init)
    })?;
    ok &= stable;
    notes.push(format!("sar C(lambda) = {cs:.3?}"));

    let g_fbp = Grid::uniform(101)?;
    let curve = fbp::continue_in_lambda_fbp(2.0, Branch::Outer, 0.05, 10, g_fbp, 51)?;
    for p in &curve.points {
        let gf = fbp::gfbp(&p.profile, 2.0, 51)?;
        let r = sar::residual_with_force(&p.profile, 2.0, p.lambda, &gf)?;
        ok &= sar::max_abs(&r) <= 1e-8;
        ok &= p.profile.symmetry_error() <= 1e-7;
    }
    // FBP linear prediction uses the potential-derived force in the
    // sensitivity right-hand side
    let bp = solve_branches(2.0)?;
    let u0 = catenoid_profile(bp.c_out, g_fbp);
    let gf = fbp::gfbp(&u0, 2.0, 51)?;
    let w = deflection::sensitivity(&u0, &gf, 2.0)?;
    let mut cs = Vec::new();
    for &lam in &[0.02, 0.01, 0.005] {
        let ul = fbp::solve_stationary_fbp(2.0, lam, &u0, 51)?;
        let mut dev = 0.0f64;
        for i in 0..g_fbp.n() {
            dev = dev.max((ul.values()[i] - u0.values()[i] - lam * w.values()[i]).abs());
        }
        cs.push(dev / (lam * lam));
    }
    let cmax = cs.iter().cloned().fold(0.0f64, f64::max);
    let cmin = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    ok &= cmax / cmin <= 3.0;
    notes.push(format!("fbp C(lambda) = {cs:.3?}"));

    Ok((ok, notes.join("; ")))
}

fn c7_outward_deflection() -> Result<(bool, String)> {
    let mut ok = true;
    let g_sar = Grid::uniform(201)?;
    let sar_curve = sar::continue_in_lambda(2.0, Branch::Outer, 0.05, 5, g_sar)?;
    let g_fbp = Grid::uniform(101)?;
    let fbp_curve = fbp::continue_in_lambda_fbp(2.0, Branch::Outer, 0.05, 5, g_fbp, 51)?;
    let mut crossings = 0usize;
    for curve in [&sar_curve, &fbp_curve] {
        for a in 0..curve.points.len() {
            for b in a + 1..curve.points.len() {
                let lo = &curve.points[a].profile;
                let hi = &curve.points[b].profile;
                for i in 1..lo.n() - 1 {
                    ok &= hi.values()[i] > lo.values()[i];
                }
                crossings += deflection::intersections(hi, lo).count;
            }
        }
    }
    ok &= crossings == 0;
    Ok((ok, format!("strict outward ordering, {crossings} crossings")))
}

fn c8_inward_deflection() -> Result<(bool, String)> {
    let mut ok = true;
    let grid = Grid::uniform(401)?;

    // just above critical: uniformly inward
    let sigma = 1.52;
    let bp = solve_branches(sigma)?;
    let u0 = catenoid_profile(bp.c_in, grid);
    let g = sar::gsar(&u0, sigma)?;
    let w = deflection::sensitivity(&u0, &g, sigma)?;
    let wmax = w.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let lam = 0.01f64.min(0.02 / wmax);
    let ul = sar::solve_stationary(sigma, lam, &u0)?;
    for i in 1..grid.n() - 1 {
        ok &= ul.values()[i] < u0.values()[i];
    }
    let low_count = deflection::intersections(&ul, &u0).count;
    ok &= low_count == 0;

    // far regime: symmetric double crossing near the sensitivity radius
    let (_, upper) = deflection::find_sigma_thresholds()?;
    let sigma_hi = upper.max(10.0);
    let bp = solve_branches(sigma_hi)?;
    let u0 = catenoid_profile(bp.c_in, grid);
    let g = sar::gsar(&u0, sigma_hi)?;
    let w = deflection::sensitivity(&u0, &g, sigma_hi)?;
    let r0 = match deflection::classify_sign_pattern(&w) {
        deflection::SignPattern::TwoSignChanges { r0 } => r0,
        p => return Ok((false, format!("expected double sign change at sigma = {sigma_hi:.3}, got {p:?}"))),
    };
    let wmax = w.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let lam = 1e-3f64.min(0.01 / wmax);
    let ul = sar::solve_stationary(sigma_hi, lam, &u0)?;
    let rep = deflection::intersections(&ul, &u0);
    ok &= rep.count == 2;
    if rep.count == 2 {
        let h2 = 2.0 * grid.h();
        ok &= (rep.crossings[0] + r0).abs() <= h2 && (rep.crossings[1] - r0).abs() <= h2;
    }
    Ok((
        ok,
        format!(
            "sigma=1.52: {low_count} crossings; sigma={sigma_hi:.3}: {} crossings, r0 = {r0:.4}",
            rep.count
        ),
    ))
}

fn c9_antimax() -> Result<(bool, String)> {
    let grid = Grid::uniform(401)?;
    let sc = geometry::sigma_crit();
    let lo = sc + 1e-3;
    let hi = 20.0;
    let mut worst = 0.0f64;
    let sigmas: Vec<f64> =
        (0..20).map(|k| lo * (hi / lo).powf(k as f64 / 19.0)).collect();
    let reports = crate::par::parallel_map(&sigmas, |&s| {
        deflection::antimax_crossvalidate(s, grid)
    });
    for rep in reports {
        let rep = rep?;
        worst = worst.max(rep.lagrange_rel_err);
    }
    Ok((worst <= 1e-4, format!("20 sigma values, max Lagrange rel err = {worst:.3e}")))
}

fn c10_thresholds() -> Result<(bool, String)> {
    let (star, upper) = deflection::find_sigma_thresholds()?;
    let sc = geometry::sigma_crit();
    let mut ok = star > sc && upper >= star;
    ok &= deflection::criterion_integral(sc + 0.01)?.1 > 0.0;
    // the I4 integrand 1 - z tanh z vanishes exactly at c_crit
    let cc = geometry::solve_c_crit();
    let mut lo = 0.5f64;
    let mut hi = 2.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - mid * mid.tanh() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ok &= (0.5 * (lo + hi) - cc).abs() <= 1e-8;
    Ok((ok, format!("sigma_star = {star:.6}, sigma_upper = {upper:.6}")))
}

fn c11_dynamics() -> Result<(bool, String)> {
    let grid = Grid::uniform(201)?;
    let bp = solve_branches(2.0)?;
    let mut ok = true;
    let mut notes = Vec::new();

    let e_out = shooting::eigenvalue(bp.c_out, 0, grid)?;
    let e_in = shooting::eigenvalue(bp.c_in, 0, grid)?;

    for &lam in &[0.0, 0.01] {
        let params = ModelParams { model: Model::Sar, sigma: 2.0, lambda: lam, n_eta: 51 };

        let reference = if lam == 0.0 {
            catenoid_profile(bp.c_out, grid)
        } else {
            sar::solve_stationary(2.0, lam, &catenoid_profile(bp.c_out, grid))?
        };
        let jac = sar::jacobian(&reference, 2.0, lam)?;
        let bound = shooting::matrix_spectrum(&jac, 1)?[0];
        let mut u0 = reference.clone();
        for i in 1..grid.n() - 1 {
            u0.values_mut()[i] += 1e-3 * e_out.v[i];
        }
        let t_max = (2000.0f64).ln() / bound.abs() * 1.3;
        let traj = dynamics::evolve(&u0, t_max, 1e-4, &params, &reference)?;
        let rate = dynamics::fit_rate(&traj)?;
        ok &= rate < 0.0 && (rate - bound).abs() <= 0.15 * bound.abs();
        if lam == 0.0 {
            let theory = 4.0 * e_out.mu;
            ok &= (rate - theory).abs() <= 0.10 * theory.abs();
        }
        notes.push(format!("outer lam={lam}: rate {rate:.4} vs bound {bound:.4}"));

        let reference = if lam == 0.0 {
            catenoid_profile(bp.c_in, grid)
        } else {
            sar::solve_stationary(2.0, lam, &catenoid_profile(bp.c_in, grid))?
        };
        let mut u0 = reference.clone();
        for i in 1..grid.n() - 1 {
            u0.values_mut()[i] += 1e-4 * e_in.v[i];
        }
        let traj = dynamics::evolve_until(
            &u0,
            20.0,
            1e-4,
            &params,
            &reference,
            Some(1e-2),
            None,
        )?;
        let growth = traj.norms.last().unwrap() / traj.norms[0];
        ok &= growth >= 10.0;
        if lam == 0.0 {
            let rate = dynamics::fit_rate(&traj)?;
            let theory = 4.0 * e_in.mu;
            ok &= (rate - theory).abs() <= 0.10 * theory.abs();
            notes.push(format!("inner lam=0: rate {rate:.4} vs {theory:.4}, growth {growth:.0}x"));
        } else {
            notes.push(format!("inner lam={lam}: growth {growth:.0}x"));
        }
    }
    Ok((ok, notes.join("; ")))
}

pub fn run_once() -> VerifyOutcome {
    let criteria = vec![
        catch(1, "critical constants", c1_critical_constants),
        catch(2, "shooting closed-form oracle", c2_shooting_oracle),
        catch(3, "principal eigencurve zero", c3_eigencurve_zero),
        catch(4, "stability sign table", c4_sign_table),
        catch(5, "electrostatic force consistency", c5_force_consistency),
        catch(6, "branch continuation, both models", c6_continuation),
        catch(7, "outward deflection ordering", c7_outward_deflection),
        catch(8, "inward deflection and crossings", c8_inward_deflection),
        catch(9, "anti-maximum cross-validation", c9_antimax),
        catch(10, "sigma thresholds", c10_thresholds),
        catch(11, "dynamic stability dichotomy", c11_dynamics),
    ];
    let all_passed = criteria.iter().all(|c| c.passed);
    VerifyOutcome { criteria, all_passed }
}

/// Runs the suite twice and appends the determinism criterion: the two runs
/// must serialize byte-identically.
pub fn run_all() -> VerifyOutcome {
    let first = run_once();
    let second = run_once();
    let a = serde_json::to_string(&first).unwrap_or_default();
    let b = serde_json::to_string(&second).unwrap_or_default();
    let deterministic = a == b;
    let mut criteria = first.criteria;
    criteria.push(CriterionResult {
        id: 12,
        name: "determinism of the suite".into(),
        passed: deterministic,
        detail: if deterministic {
            format!("two runs byte-identical ({} bytes)", a.len())
        } else {
            "runs differ".into()
        },
    });
    let all_passed = criteria.iter().all(|c| c.passed);
    VerifyOutcome { criteria, all_passed }
}

/// Simpson helper kept for threshold-time sanity checks in callers.
pub fn i4_integrand_integral(c: f64) -> f64 {
    simpson_fn(|z| 1.0 - z * z.tanh(), 0.0, c, 2001)
}
