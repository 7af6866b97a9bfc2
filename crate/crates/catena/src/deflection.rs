//! Direction of deflection under small voltage: the sensitivity profile
//! d(lambda) u at lambda = 0, its sign pattern, the phi-weighted criterion
//! integral that predicts the pattern, and the sigma thresholds separating
//! the all-inward from the sign-changing regime on the inner branch.

use crate::error::{Error, Result};
use crate::geometry::{catenoid_profile, solve_branches, solve_c_crit, Branch};
use crate::grid::{Grid, Profile};
use crate::quad::{simpson, simpson_fn};
use crate::sar::{self, ForceField, Model};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SignPattern {
    AllNegative,
    AllPositive,
    TwoSignChanges { r0: f64 },
    Other { sign_changes: usize },
}

#[derive(Debug, Clone)]
pub struct DeflectionReport {
    pub sigma: f64,
    pub branch: Branch,
    pub model: Model,
    pub sensitivity: Profile,
    pub sign_pattern: SignPattern,
    pub criterion_integral: f64,
    pub i1: f64,
    pub i4: f64,
    pub end_slopes: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    pub crossings: Vec<f64>,
    pub count: usize,
}

/// Linearized response to switching on the force: solves DF(u0) w = -g with
/// Dirichlet ends. Fails with SingularOperator at the fold where zero is an
/// eigenvalue.
pub fn sensitivity(u0: &Profile, force: &ForceField, sigma: f64) -> Result<Profile> {
    let n = u0.n();
    let jac = sar::jacobian(u0, sigma, 0.0)?;
    let rhs: Vec<f64> = force.values[1..n - 1].iter().map(|&g| -g).collect();
    let w_int = jac.solve(&rhs).map_err(|_| Error::SingularOperator)?;
    let mut w = vec![0.0; n];
    w[1..n - 1].copy_from_slice(&w_int);
    Profile::new(u0.grid(), w)
}

/// Classifies the interior sign structure of a profile-shaped sample set.
/// Values below a relative dead band are treated as zero; a symmetric
/// negative core with positive collar is reported with its crossing radius.
pub fn classify_sign_pattern(w: &Profile) -> SignPattern {
    let n = w.n();
    let grid = w.grid();
    let scale = w.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-9 * scale;
    let mut signs: Vec<(f64, f64)> = Vec::new();
    for i in 1..n - 1 {
        let v = w.values()[i];
        if v.abs() > tol {
            signs.push((grid.node(i), v));
        }
    }
    if signs.is_empty() {
        return SignPattern::Other { sign_changes: 0 };
    }
    let mut changes = Vec::new();
    for k in 1..signs.len() {
        if signs[k - 1].1.signum() != signs[k].1.signum() {
            let (z0, v0) = signs[k - 1];
            let (z1, v1) = signs[k];
            changes.push(z0 - v0 * (z1 - z0) / (v1 - v0));
        }
    }
    match changes.len() {
        0 if signs[0].1 < 0.0 => SignPattern::AllNegative,
        0 => SignPattern::AllPositive,
        2 if signs[0].1 > 0.0 && signs[signs.len() - 1].1 > 0.0 => {
            SignPattern::TwoSignChanges { r0: 0.5 * (changes[1] - changes[0]) }
        }
        k => SignPattern::Other { sign_changes: k },
    }
}

/// phi(z) = cosh(cz) - cz sinh(cz), the even solution of the zero-eigenvalue
/// initial value problem of the linearization at an inner catenoid.
pub fn phi(c_in: f64, grid: Grid) -> Vec<f64> {
    (0..grid.n())
        .map(|i| {
            let z = grid.node(i);
            (c_in * z).cosh() - c_in * z * (c_in * z).sinh()
        })
        .collect()
}

/// Max-norm residual of phi in the discrete flux form of its defining
/// equation (sech^2 phi')' + c^2 sech^2 phi = 0; second order in h.
pub fn phi_ode_residual(c_in: f64, grid: Grid) -> f64 {
    let p = phi(c_in, grid);
    let h = grid.h();
    let mut worst = 0.0f64;
    for i in 1..grid.n() - 1 {
        let z = grid.node(i);
        let zp = z + 0.5 * h;
        let zm = z - 0.5 * h;
        let flux = ((p[i + 1] - p[i]) / h / (c_in * zp).cosh().powi(2)
            - (p[i] - p[i - 1]) / h / (c_in * zm).cosh().powi(2))
            / h;
        let sech2 = 1.0 / (c_in * z).cosh().powi(2);
        worst = worst.max((flux + c_in * c_in * sech2 * p[i]).abs());
    }
    worst
}

/// Positive zero of phi on (0, 1), found by bisection; the analytic location
/// is c_crit/c_in.
pub fn phi_zero(c_in: f64) -> Result<f64> {
    let f = |z: f64| (c_in * z).cosh() - c_in * z * (c_in * z).sinh();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if f(hi) >= 0.0 {
        return Err(Error::NotBracketed { what: "phi zero on (0,1)".into() });
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form force density of the inner catenoid in the reduced model:
/// g = cosh^2(c) / ( cosh(cz) ln^2(2 cosh(c)/cosh(cz)) ).
fn gsar_catenoid(c: f64, z: f64) -> f64 {
    let ch = (c * z).cosh();
    let l = (2.0 * c.cosh() / ch).ln();
    c.cosh().powi(2) / (ch * l * l)
}

/// The criterion integral int g phi dz over (-1, 1) and its substituted form
/// I1 = int_0^c (1 - t tanh t)/ln^2(2 cosh c / cosh t) dt; the two are
/// related by full = 2 cosh^2(c)/c * I1 and cross-checked to 1e-8 relative.
pub fn criterion_integral(sigma: f64) -> Result<(f64, f64)> {
    let bp = solve_branches(sigma)?;
    let c = bp.c_in;
    let full = simpson_fn(
        |z| gsar_catenoid(c, z) * ((c * z).cosh() - c * z * (c * z).sinh()),
        -1.0,
        1.0,
        4001,
    );
    let i1 = simpson_fn(
        |t| (1.0 - t * t.tanh()) / (2.0 * c.cosh() / t.cosh()).ln().powi(2),
        0.0,
        c,
        4001,
    );
    let scale = 2.0 * c.cosh().powi(2) / c;
    debug_assert!((full / scale - i1).abs() <= 1e-8 * i1.abs().max(1.0));
    Ok((full, i1))
}

/// I4 = int_0^c (1 - z tanh z) dz; its integrand changes sign at c_crit, and
/// the integral itself turns negative once c_in is large enough.
pub fn i4(sigma: f64) -> Result<f64> {
    let bp = solve_branches(sigma)?;
    Ok(simpson_fn(|z| 1.0 - z * z.tanh(), 0.0, bp.c_in, 2001))
}

fn bisect_zero(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 * (1.0 + mid.abs()) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo.signum() == fm.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

/// Scans sigma in (sigma_crit, 50] on a log-spaced lattice and bisects the
/// first zero of I1 (empirical boundary of the all-inward regime) and the
/// zero of I4 (certified sufficient bound for the sign-changing regime).
pub fn find_sigma_thresholds() -> Result<(f64, f64)> {
    let sc = crate::geometry::sigma_crit();
    let lo = sc + 1e-4;
    let hi = 50.0;
    let samples = 200;
    let grid_pt = |k: usize| lo * (hi / lo).powf(k as f64 / (samples - 1) as f64);

    let mut star = None;
    let mut prev = criterion_integral(grid_pt(0))?.1;
    let mut prev_s = grid_pt(0);
    for k in 1..samples {
        let s = grid_pt(k);
        let v = criterion_integral(s)?.1;
        if star.is_none() && prev.signum() != v.signum() {
            star = Some(bisect_zero(|x| criterion_integral(x).unwrap().1, prev_s, s));
        }
        prev = v;
        prev_s = s;
    }
    let star = star.ok_or_else(|| Error::NotBracketed {
        what: "I1 zero in (sigma_crit, 50]".into(),
    })?;

    let mut upper = None;
    let mut prev = i4(grid_pt(0))?;
    let mut prev_s = grid_pt(0);
    for k in 1..samples {
        let s = grid_pt(k);
        let v = i4(s)?;
        if prev.signum() != v.signum() {
            upper = Some(bisect_zero(|x| i4(x).unwrap(), prev_s, s));
            break;
        }
        prev = v;
        prev_s = s;
    }
    let upper = upper.ok_or_else(|| Error::NotBracketed {
        what: "I4 zero in (sigma_crit, 50]".into(),
    })?;
    Ok((star, upper))
}

/// Strict sign changes of u_a - u_b on the open interval, located by linear
/// interpolation between the bracketing nodes.
pub fn intersections(u_a: &Profile, u_b: &Profile) -> IntersectionReport {
    assert_eq!(u_a.n(), u_b.n());
    let n = u_a.n();
    let grid = u_a.grid();
    let d: Vec<f64> = (0..n).map(|i| u_a.values()[i] - u_b.values()[i]).collect();
    let mut crossings = Vec::new();
    let tol = 1e-13 * d.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let mut last: Option<(f64, f64)> = None;
    for i in 1..n - 1 {
        if d[i].abs() <= tol {
            continue;
        }
        if let Some((z0, v0)) = last {
            if v0.signum() != d[i].signum() {
                let z1 = grid.node(i);
                crossings.push(z0 - v0 * (z1 - z0) / (d[i] - v0));
            }
        }
        last = Some((grid.node(i), d[i]));
    }
    IntersectionReport { count: crossings.len(), crossings }
}

#[derive(Debug, Clone, Serialize)]
pub struct AntimaxReport {
    pub sigma: f64,
    pub integral: f64,
    pub sign_pattern: SignPattern,
    pub end_slopes: (f64, f64),
    pub lagrange_lhs: f64,
    pub lagrange_rhs: f64,
    pub lagrange_rel_err: f64,
    pub indeterminate: bool,
}

/// Cross-validates the anti-maximum criterion at the inner catenoid: the
/// sign of int g phi must imply the computed sensitivity pattern (positive
/// -> all negative with inward end slopes; negative -> symmetric double sign
/// change), and the Lagrange identity
/// phi(1) w'(1) / cosh^2(c) = -(1/(2 sigma^2)) int g phi dz
/// must hold to 1e-4 relative between independently computed sides.
pub fn antimax_crossvalidate(sigma: f64, grid: Grid) -> Result<AntimaxReport> {
    let bp = solve_branches(sigma)?;
    let c = bp.c_in;
    let u0 = catenoid_profile(c, grid);
    let g = sar::gsar(&u0, sigma)?;
    let w = sensitivity(&u0, &g, sigma)?;
    let pattern = classify_sign_pattern(&w);
    let end_slopes = (w.slope(0), w.slope(grid.n() - 1));
    let (integral, _) = criterion_integral(sigma)?;

    // second-order end slope, Richardson-extrapolated over a grid refinement
    let fine = grid.refined();
    let uf = catenoid_profile(c, fine);
    let gf = sar::gsar(&uf, sigma)?;
    let wf = sensitivity(&uf, &gf, sigma)?;
    let slope1 = (4.0 * wf.slope(fine.n() - 1) - end_slopes.1) / 3.0;

    let phi1 = c.cosh() - c * c.sinh();
    let lhs = phi1 * slope1 / c.cosh().powi(2);
    let rhs = -integral / (2.0 * sigma * sigma);
    let rel = (lhs - rhs).abs() / rhs.abs().max(1e-30);
    if rel > 1e-4 {
        return Err(Error::CriterionViolated {
            detail: format!(
                "Lagrange identity mismatch at sigma = {sigma}: lhs = {lhs:.6e}, rhs = {rhs:.6e}"
            ),
        });
    }

    let indeterminate = integral.abs() <= 1e-10;
    if !indeterminate {
        let ok = if integral > 0.0 {
            matches!(pattern, SignPattern::AllNegative)
                && end_slopes.0 < 0.0
                && end_slopes.1 > 0.0
        } else {
            matches!(pattern, SignPattern::TwoSignChanges { .. })
                && end_slopes.0 > 0.0
                && end_slopes.1 < 0.0
        };
        if !ok {
            return Err(Error::CriterionViolated {
                detail: format!(
                    "integral sign {} vs pattern {:?} at sigma = {sigma}",
                    integral.signum(),
                    pattern
                ),
            });
        }
    }
    Ok(AntimaxReport {
        sigma,
        integral,
        sign_pattern: pattern,
        end_slopes,
        lagrange_lhs: lhs,
        lagrange_rhs: rhs,
        lagrange_rel_err: rel,
        indeterminate,
    })
}

/// Full deflection analysis for one branch, using either the closed-form or
/// the potential-derived force.
pub fn analyze(
    sigma: f64,
    branch: Branch,
    model: Model,
    grid: Grid,
    n_eta: usize,
) -> Result<DeflectionReport> {
    let bp = solve_branches(sigma)?;
    let u0 = catenoid_profile(bp.c(branch), grid);
    let g = match model {
        Model::Sar => sar::gsar(&u0, sigma)?,
        Model::Fbp => crate::fbp::gfbp(&u0, sigma, n_eta)?,
    };
    let w = sensitivity(&u0, &g, sigma)?;
    let pattern = classify_sign_pattern(&w);
    let end_slopes = (w.slope(0), w.slope(grid.n() - 1));
    let (full, i1v) = criterion_integral(sigma)?;
    let i4v = i4(sigma)?;
    Ok(DeflectionReport {
        sigma,
        branch,
        model,
        sensitivity: w,
        sign_pattern: pattern,
        criterion_integral: full,
        i1: i1v,
        i4: i4v,
        end_slopes,
    })
}

/// Simpson value of int g phi evaluated from sampled (not closed-form)
/// quantities on the given grid; used as an independent cross-check.
pub fn criterion_integral_sampled(sigma: f64, grid: Grid) -> Result<f64> {
    let bp = solve_branches(sigma)?;
    let u0 = catenoid_profile(bp.c_in, grid);
    let g = sar::gsar(&u0, sigma)?;
    let p = phi(bp.c_in, grid);
    let vals: Vec<f64> = (0..grid.n()).map(|i| g.values[i] * p[i]).collect();
    Ok(simpson(&vals, grid.h()))
}

pub fn sigma_crit_ratio_zero(c_in: f64) -> f64 {
    solve_c_crit() / c_in
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_initial_conditions_and_endpoint_sign() {
        let g = Grid::uniform(401).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let p = phi(bp.c_in, g);
        assert!((p[200] - 1.0).abs() < 1e-15);
        assert!((p[201] - p[199]).abs() < 1e-12);
        assert!(p[400] < 0.0);
    }

    #[test]
    fn phi_ode_residual_second_order() {
        let bp = solve_branches(2.0).unwrap();
        let r1 = phi_ode_residual(bp.c_in, Grid::uniform(201).unwrap());
        let r2 = phi_ode_residual(bp.c_in, Grid::uniform(401).unwrap());
        assert!(r1 / r2 > 3.4, "ratio {}", r1 / r2);
    }

    #[test]
    fn phi_zero_matches_ratio() {
        let bp = solve_branches(2.0).unwrap();
        let z = phi_zero(bp.c_in).unwrap();
        let exact = solve_c_crit() / bp.c_in;
        assert!((z - exact).abs() < 1e-8);
        assert!((exact - 0.5641).abs() < 1e-3);
    }

    #[test]
    fn outer_sensitivity_is_positive() {
        let g = Grid::uniform(401).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let u0 = catenoid_profile(bp.c_out, g);
        let force = sar::gsar(&u0, 2.0).unwrap();
        let w = sensitivity(&u0, &force, 2.0).unwrap();
        for i in 1..400 {
            assert!(w.values()[i] > 0.0);
        }
        assert!(w.slope(0) > 0.0 && w.slope(400) < 0.0);
        assert_eq!(classify_sign_pattern(&w), SignPattern::AllPositive);
    }

    #[test]
    fn inner_sensitivity_patterns() {
        let g = Grid::uniform(401).unwrap();
        for (sigma, expect_neg) in [(1.52, true), (10.0, false)] {
            let bp = solve_branches(sigma).unwrap();
            let u0 = catenoid_profile(bp.c_in, g);
            let force = sar::gsar(&u0, sigma).unwrap();
            let w = sensitivity(&u0, &force, sigma).unwrap();
            let pat = classify_sign_pattern(&w);
            if expect_neg {
                assert_eq!(pat, SignPattern::AllNegative, "sigma {sigma}");
            } else {
                assert!(
                    matches!(pat, SignPattern::TwoSignChanges { .. }),
                    "sigma {sigma}: {pat:?}"
                );
            }
        }
    }

    #[test]
    fn i1_signs_and_identity() {
        let sc = crate::geometry::sigma_crit();
        let (_, i1_low) = criterion_integral(sc + 0.01).unwrap();
        assert!(i1_low > 0.0);
        let (_, i1_high) = criterion_integral(10.0).unwrap();
        assert!(i1_high < 0.0);
        // sampled vs closed-form agreement
        let g = Grid::uniform(4001).unwrap();
        let sampled = criterion_integral_sampled(3.0, g).unwrap();
        let (full, _) = criterion_integral(3.0).unwrap();
        assert!((sampled - full).abs() < 1e-5 * full.abs().max(1.0));
    }

    #[test]
    fn i4_signs() {
        let sc = crate::geometry::sigma_crit();
        assert!(i4(sc + 1e-3).unwrap() > 0.0);
        assert!(i4(10.0).unwrap() < 0.0);
    }

    #[test]
    fn thresholds_ordering() {
        let (star, upper) = find_sigma_thresholds().unwrap();
        let sc = crate::geometry::sigma_crit();
        assert!(star > sc);
        assert!(upper >= star);
        assert!(criterion_integral(star).unwrap().1.abs() <= 1e-8);
        assert!(i4(upper).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn antimax_holds_across_sigma() {
        let g = Grid::uniform(401).unwrap();
        for &s in &[1.52, 2.0, 5.0, 10.0] {
            let rep = antimax_crossvalidate(s, g).unwrap();
            assert!(rep.lagrange_rel_err <= 1e-4, "sigma {s}: {}", rep.lagrange_rel_err);
        }
    }

    #[test]
    fn intersections_of_shifted_catenoids() {
        let g = Grid::uniform(401).unwrap();
        let bp2 = solve_branches(2.0).unwrap();
        let a = catenoid_profile(bp2.c_out, g);
        let b = catenoid_profile(bp2.c_in, g);
        // outer lies strictly above inner in the interior: no crossings
        let rep = intersections(&a, &b);
        assert_eq!(rep.count, 0);
        let same = intersections(&a, &a);
        assert_eq!(same.count, 0);
    }
}
