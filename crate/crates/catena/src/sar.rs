//! Small-aspect-ratio model: closed-form electrostatic force, conservative
//! residual, analytic tridiagonal Jacobian, damped Newton solve, and
//! natural-parameter continuation in the voltage strength lambda.

use crate::error::{Error, Result};
use crate::geometry::{catenoid_profile, solve_branches, Branch};
use crate::grid::{Grid, Profile, EPS_GAP};
use crate::linalg::Tridiagonal;
use serde::Serialize;

/// Nonnegative force density sampled at the grid nodes.
#[derive(Debug, Clone)]
pub struct ForceField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

/// One converged continuation point.
#[derive(Debug, Clone)]
pub struct ContinuationPoint {
    pub lambda: f64,
    pub profile: Profile,
    pub converged: bool,
}

/// The lambda-family of stationary profiles emanating from a catenoid branch.
#[derive(Debug, Clone)]
pub struct ContinuationCurve {
    pub sigma: f64,
    pub branch: Branch,
    pub points: Vec<ContinuationPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    Sar,
    Fbp,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Sar => "sar",
            Model::Fbp => "fbp",
        }
    }
}

fn gap_term(u: f64) -> Result<(f64, f64)> {
    let gap = u + 1.0;
    if !(gap > EPS_GAP) {
        return Err(Error::SingularGap { node: usize::MAX, eps: EPS_GAP });
    }
    let l = (2.0 / gap).ln();
    Ok((gap, l))
}

/// g_sar(u) = sqrt(1 + sigma^2 u_z^2) / ((u+1)^2 ln^2(2/(u+1))), with the
/// slope by centered differences (one-sided at the ends).
pub fn gsar(u: &Profile, sigma: f64) -> Result<ForceField> {
    u.check_admissible(EPS_GAP)?;
    let grid = u.grid();
    let mut values = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        let (gap, l) = gap_term(u.values()[i])?;
        let s = u.slope(i);
        values.push((1.0 + sigma * sigma * s * s).sqrt() / (gap * gap * l * l));
    }
    Ok(ForceField { grid, values })
}

/// Analytic derivative of g_sar with respect to (u, u_z) at one node:
/// returns (dg/du, dg/du_z).
fn dgsar_partials(u: f64, p: f64, sigma: f64) -> (f64, f64) {
    let gap = u + 1.0;
    let l = (2.0 / gap).ln();
    let root = (1.0 + sigma * sigma * p * p).sqrt();
    let phi = 1.0 / (gap * gap * l * l);
    // d phi / du = 2 (1/l - 1) / (gap^3 l^2)
    let dphi = 2.0 * (1.0 / l - 1.0) / (gap * gap * gap * l * l);
    let dg_du = root * dphi;
    let dg_dp = sigma * sigma * p / root * phi;
    (dg_du, dg_dp)
}

/// Residual of the stationary problem, zero at the Dirichlet ends. The
/// quasilinear term is discretized in conservative form with the arctan flux
/// evaluated at the cell-midpoint slopes, so it vanishes to O(h^2) on exact
/// catenoids. Sign convention: r = 1 at u = 0, lambda = 0.
pub fn residual_with_force(
    u: &Profile,
    sigma: f64,
    lambda: f64,
    force: &ForceField,
) -> Result<Vec<f64>> {
    u.check_admissible(EPS_GAP)?;
    let grid = u.grid();
    let n = grid.n();
    let h = grid.h();
    let v = u.values();
    let mut r = vec![0.0; n];
    for i in 1..n - 1 {
        let sp = (v[i + 1] - v[i]) / h;
        let sm = (v[i] - v[i - 1]) / h;
        let flux_div = sigma * ((sigma * sp).atan() - (sigma * sm).atan()) / h;
        r[i] = -flux_div + 1.0 / (v[i] + 1.0) - lambda * force.values[i];
    }
    Ok(r)
}

pub fn residual(u: &Profile, sigma: f64, lambda: f64) -> Result<Vec<f64>> {
    let g = gsar(u, sigma)?;
    residual_with_force(u, sigma, lambda, &g)
}

/// Tridiagonal interior discretization of the linearized operator
/// DF(u) + lambda Dg_sar(u):
///   v -> sigma^2 d/dz( v_z / (1 + sigma^2 u_z^2) ) + v/(u+1)^2 + lambda Dg v.
/// Row i couples interior unknowns only; equals minus the derivative of the
/// residual above (exactly, midpoint slopes included).
pub fn jacobian(u: &Profile, sigma: f64, lambda: f64) -> Result<Tridiagonal> {
    u.check_admissible(EPS_GAP)?;
    let grid = u.grid();
    let n = grid.n();
    let h = grid.h();
    let v = u.values();
    let m = n - 2;
    let mut t = Tridiagonal::zeros(m);
    let s2 = sigma * sigma;
    for i in 1..n - 1 {
        let k = i - 1;
        let sp = (v[i + 1] - v[i]) / h;
        let sm = (v[i] - v[i - 1]) / h;
        let ap = 1.0 / (1.0 + s2 * sp * sp);
        let am = 1.0 / (1.0 + s2 * sm * sm);
        let gap = v[i] + 1.0;
        let (dg_du, dg_dp) = dgsar_partials(v[i], u.slope(i), sigma);
        t.diag[k] = -s2 * (ap + am) / (h * h) + 1.0 / (gap * gap) + lambda * dg_du;
        if k + 1 < m {
            t.sup[k] = s2 * ap / (h * h) + lambda * dg_dp / (2.0 * h);
        }
        if k > 0 {
            t.sub[k - 1] = s2 * am / (h * h) - lambda * dg_dp / (2.0 * h);
        }
    }
    Ok(t)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Damped Newton (Armijo backtracking on the residual 2-norm) until the
/// max-norm residual drops below 1e-10.
pub fn solve_stationary(sigma: f64, lambda: f64, init: &Profile) -> Result<Profile> {
    // the flux difference sigma*(arctan - arctan)/h cannot cancel below
    // ~sigma*pi/h units of rounding, so the nominal tolerance is floored there
    let floor = 1.2e-13 * sigma * std::f64::consts::PI / init.grid().h();
    newton_solve(init, 1e-10f64.max(floor), 50, |u| {
        let r = residual(u, sigma, lambda)?;
        let j = jacobian(u, sigma, lambda)?;
        Ok((r, j))
    })
}

/// Generic damped Newton loop shared with the free boundary solver. The
/// closure returns (residual, Jacobian of F + lambda g) for the current
/// iterate; the update solves J delta = r.
pub fn newton_solve(
    init: &Profile,
    tol: f64,
    max_iter: usize,
    mut system: impl FnMut(&Profile) -> Result<(Vec<f64>, Tridiagonal)>,
) -> Result<Profile> {
    let mut u = init.clone();
    let n = u.n();
    for _ in 0..max_iter {
        let (r, jac) = system(&u)?;
        if max_abs(&r) <= tol {
            return Ok(u);
        }
        let delta = jac.solve(&r[1..n - 1])?;
        let r_norm = norm2(&r);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let mut trial = u.clone();
            for i in 1..n - 1 {
                trial.values_mut()[i] += alpha * delta[i - 1];
            }
            match system(&trial) {
                Ok((rt, _)) if norm2(&rt) <= (1.0 - 1e-4 * alpha) * r_norm => {
                    u = trial;
                    accepted = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::NoConvergence {
                what: "Newton line search stalled".into(),
                iterations: max_iter,
            });
        }
    }
    let (r, _) = system(&u)?;
    if max_abs(&r) <= tol {
        Ok(u)
    } else {
        Err(Error::NoConvergence { what: "Newton iteration".into(), iterations: max_iter })
    }
}

/// Natural-parameter continuation from the branch catenoid, with the previous
/// solution as predictor and up to six step-halvings on failure. On
/// exhaustion the error message carries the last converged lambda as the
/// fold estimate.
pub fn continue_in_lambda(
    sigma: f64,
    branch: Branch,
    lambda_max: f64,
    steps: usize,
    grid: Grid,
) -> Result<ContinuationCurve> {
    continue_with(sigma, branch, lambda_max, steps, grid, |lam, init| {
        solve_stationary(sigma, lam, init)
    })
}

pub fn continue_with(
    sigma: f64,
    branch: Branch,
    lambda_max: f64,
    steps: usize,
    grid: Grid,
    mut solve: impl FnMut(f64, &Profile) -> Result<Profile>,
) -> Result<ContinuationCurve> {
    assert!(steps >= 1 && lambda_max >= 0.0);
    let bp = solve_branches(sigma)?;
    let u0 = catenoid_profile(bp.c(branch), grid);
    let mut points = vec![ContinuationPoint { lambda: 0.0, profile: u0, converged: true }];
    let dl = lambda_max / steps as f64;
    for k in 1..=steps {
        let target = dl * k as f64;
        let prev = points.last().unwrap().clone();
        let mut lam = prev.lambda;
        let mut u = prev.profile;
        let mut step = target - lam;
        let mut halvings = 0;
        while lam < target - 1e-15 {
            match solve(lam + step, &u) {
                Ok(next) => {
                    lam += step;
                    u = next;
                    step = (target - lam).min(step);
                }
                Err(e) => {
                    halvings += 1;
                    if halvings > 6 {
                        return Err(Error::NoConvergence {
                            what: format!(
                                "continuation stalled at lambda = {lam:.6} (fold estimate); \
                                 step-halving exhausted: {e}"
                            ),
                            iterations: halvings,
                        });
                    }
                    step *= 0.5;
                }
            }
        }
        points.push(ContinuationPoint { lambda: target, profile: u, converged: true });
    }
    Ok(ContinuationCurve { sigma, branch, points })
}
