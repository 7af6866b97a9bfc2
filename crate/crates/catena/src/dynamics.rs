//! Gradient-flow dynamics of the film profile for both models: first-order
//! IMEX stepping (implicit frozen-coefficient diffusion, explicit reaction),
//! trajectory recording against a reference profile, and exponential rate
//! fitting for the stability dichotomy.

use crate::error::{Error, Result};
use crate::grid::{Profile, EPS_GAP};
use crate::linalg::Tridiagonal;
use crate::sar::{self, Model};
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub model: Model,
    pub sigma: f64,
    pub lambda: f64,
    /// radial resolution of the potential solve; unused by the reduced model
    pub n_eta: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Event {
    None,
    Touchdown { t: f64 },
    CeilingContact { t: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub profiles: Vec<Profile>,
    pub norms: Vec<f64>,
    pub event: Event,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub fitted_rate: f64,
    pub spectral_bound: f64,
    pub verdict: Verdict,
}

fn reaction(u: &Profile, params: &ModelParams) -> Result<Vec<f64>> {
    match params.model {
        Model::Sar => sar::residual(u, params.sigma, params.lambda),
        Model::Fbp => {
            let g = crate::fbp::gfbp(u, params.sigma, params.n_eta)?;
            sar::residual_with_force(u, params.sigma, params.lambda, &g)
        }
    }
}

/// One IMEX step: u_t = -r(u) with the quasilinear diffusion handled
/// implicitly through its frozen-coefficient linearization, so stationary
/// profiles are exact fixed points of the scheme.
pub fn step(u: &Profile, dt: f64, params: &ModelParams) -> Result<Profile> {
    assert!(dt > 0.0);
    let grid = u.grid();
    let n = grid.n();
    let h = grid.h();
    let s2 = params.sigma * params.sigma;
    let r = reaction(u, params)?;

    let m = n - 2;
    let mut a = Tridiagonal::zeros(m);
    let v = u.values();
    for i in 1..n - 1 {
        let k = i - 1;
        let sp = (v[i + 1] - v[i]) / h;
        let sm = (v[i] - v[i - 1]) / h;
        let ap = 1.0 / (1.0 + s2 * sp * sp);
        let am = 1.0 / (1.0 + s2 * sm * sm);
        a.diag[k] = 1.0 + dt * s2 * (ap + am) / (h * h);
        if k + 1 < m {
            a.sup[k] = -dt * s2 * ap / (h * h);
        }
        if k > 0 {
            a.sub[k - 1] = -dt * s2 * am / (h * h);
        }
    }
    let rhs: Vec<f64> = r[1..n - 1].iter().map(|&x| -dt * x).collect();
    let delta = a.solve(&rhs)?;

    let mut next = u.clone();
    for i in 1..n - 1 {
        next.values_mut()[i] += delta[i - 1];
    }
    for (i, &x) in next.values().iter().enumerate() {
        if x + 1.0 <= EPS_GAP {
            let _ = i;
            return Err(Error::Touchdown { t: 0.0 });
        }
        if x >= 1.0 - EPS_GAP {
            return Err(Error::CeilingContact { t: 0.0 });
        }
    }
    Ok(next)
}

/// Steps until t >= t_max, an optional distance bound is crossed, or the
/// profile hits the axis or the cylinder (recorded as the trajectory event,
/// not a failure).
pub fn evolve_until(
    u0: &Profile,
    t_max: f64,
    dt: f64,
    params: &ModelParams,
    reference: &Profile,
    stop_above: Option<f64>,
    stop_below: Option<f64>,
) -> Result<Trajectory> {
    let mut times = vec![0.0];
    let mut profiles = vec![u0.clone()];
    let mut norms = vec![u0.max_distance(reference)];
    let mut event = Event::None;
    let mut t = 0.0;
    let mut u = u0.clone();
    while t < t_max - 0.5 * dt {
        match step(&u, dt, params) {
            Ok(next) => {
                u = next;
                t += dt;
                times.push(t);
                norms.push(u.max_distance(reference));
                profiles.push(u.clone());
                let d = *norms.last().unwrap();
                if stop_above.map_or(false, |b| d >= b) || stop_below.map_or(false, |b| d <= b) {
                    break;
                }
            }
            Err(Error::Touchdown { .. }) => {
                event = Event::Touchdown { t: t + dt };
                break;
            }
            Err(Error::CeilingContact { .. }) => {
                event = Event::CeilingContact { t: t + dt };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory { times, profiles, norms, event })
}

pub fn evolve(
    u0: &Profile,
    t_max: f64,
    dt: f64,
    params: &ModelParams,
    reference: &Profile,
) -> Result<Trajectory> {
    evolve_until(u0, t_max, dt, params, reference, None, None)
}

/// Least-squares slope of ln(distance) against t over the trailing decade.
/// Requires at least 20 usable samples spanning two decades overall.
pub fn fit_rate(traj: &Trajectory) -> Result<f64> {
    let usable: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.norms)
        .filter(|(_, &n)| n > 0.0)
        .map(|(&t, &n)| (t, n))
        .collect();
    if usable.len() < 20 {
        return Err(Error::InsufficientDecay);
    }
    let max = usable.iter().fold(0.0f64, |a, &(_, n)| a.max(n));
    let min = usable.iter().fold(f64::INFINITY, |a, &(_, n)| a.min(n));
    if max / min < 100.0 {
        return Err(Error::InsufficientDecay);
    }
    let last = usable.last().unwrap().1;
    let window: Vec<(f64, f64)> = usable
        .iter()
        .filter(|(_, n)| (n.log10() - last.log10()).abs() <= 1.0)
        .map(|&(t, n)| (t, n.ln()))
        .collect();
    if window.len() < 20 {
        return Err(Error::InsufficientDecay);
    }
    let m = window.len() as f64;
    let st: f64 = window.iter().map(|&(t, _)| t).sum::<f64>() / m;
    let sy: f64 = window.iter().map(|&(_, y)| y).sum::<f64>() / m;
    let num: f64 = window.iter().map(|&(t, y)| (t - st) * (y - sy)).sum();
    let den: f64 = window.iter().map(|&(t, _)| (t - st) * (t - st)).sum();
    Ok(num / den)
}

/// Rate fit plus comparison with the leading eigenvalue of the discretized
/// linearization at the reference profile.
pub fn stability_report(
    traj: &Trajectory,
    reference: &Profile,
    sigma: f64,
    lambda: f64,
) -> Result<StabilityReport> {
    let fitted_rate = fit_rate(traj)?;
    let jac = sar::jacobian(reference, sigma, lambda)?;
    let spectral_bound = crate::shooting::matrix_spectrum(&jac, 1)?[0];
    let verdict = if fitted_rate < 0.0 { Verdict::Stable } else { Verdict::Unstable };
    Ok(StabilityReport { fitted_rate, spectral_bound, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catenoid_profile, solve_branches};
    use crate::grid::Grid;
    use crate::shooting;

    fn sar_params(sigma: f64, lambda: f64) -> ModelParams {
        ModelParams { model: Model::Sar, sigma, lambda, n_eta: 51 }
    }

    #[test]
    fn flat_profile_first_step_drops_by_dt() {
        let g = Grid::uniform(101).unwrap();
        let u = Profile::flat(g);
        let dt = 1e-4;
        let next = step(&u, dt, &sar_params(2.0, 0.0)).unwrap();
        // away from the Dirichlet boundary layer of the implicit operator
        for i in 20..=80 {
            assert!((next.values()[i] + dt).abs() < 10.0 * dt * dt);
        }
    }

    #[test]
    fn stationary_profile_is_fixed_point() {
        let g = Grid::uniform(201).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let u = sar::solve_stationary(2.0, 0.01, &catenoid_profile(bp.c_out, g)).unwrap();
        let next = step(&u, 1e-3, &sar_params(2.0, 0.01)).unwrap();
        assert!(next.max_distance(&u) <= 1e-9);
    }

    #[test]
    fn first_order_self_convergence_in_dt() {
        let g = Grid::uniform(101).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let mut u0 = catenoid_profile(bp.c_out, g);
        for i in 1..100 {
            let z = g.node(i);
            u0.values_mut()[i] += 0.05 * (1.0 - z * z);
        }
        let p = sar_params(2.0, 0.0);
        let reference = catenoid_profile(bp.c_out, g);
        let t = 0.1;
        let mut finals = Vec::new();
        for &dt in &[1e-3, 5e-4, 2.5e-4] {
            let traj = evolve(&u0, t, dt, &p, &reference).unwrap();
            finals.push(traj.profiles.last().unwrap().clone());
        }
        let e1 = finals[0].max_distance(&finals[2]);
        let e2 = finals[1].max_distance(&finals[2]);
        // halving dt should roughly halve the error against the finest run
        let ratio = e1 / e2;
        assert!(ratio > 2.0 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn symmetry_is_preserved() {
        let g = Grid::uniform(101).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let mut u0 = catenoid_profile(bp.c_out, g);
        for i in 1..100 {
            let z = g.node(i);
            u0.values_mut()[i] += 0.01 * (1.0 - z * z);
        }
        let reference = catenoid_profile(bp.c_out, g);
        let traj = evolve(&u0, 1.0, 1e-3, &sar_params(2.0, 0.0), &reference).unwrap();
        for p in &traj.profiles {
            assert!(p.symmetry_error() <= 1e-8);
        }
    }

    #[test]
    fn outer_branch_decay_rate_matches_spectrum() {
        let g = Grid::uniform(201).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let reference = catenoid_profile(bp.c_out, g);
        let ep = shooting::eigenvalue(bp.c_out, 0, g).unwrap();
        let rate_theory = 4.0 * ep.mu; // sigma^2 mu_0
        assert!(rate_theory < 0.0);
        let mut u0 = reference.clone();
        for i in 1..200 {
            u0.values_mut()[i] += 1e-3 * ep.v[i];
        }
        let t_max = (1000.0f64).ln() / rate_theory.abs() * 1.3;
        let traj =
            evolve(&u0, t_max, 1e-4, &sar_params(2.0, 0.0), &reference).unwrap();
        let rate = fit_rate(&traj).unwrap();
        assert!(
            (rate - rate_theory).abs() <= 0.10 * rate_theory.abs(),
            "fitted {rate}, expected {rate_theory}"
        );
    }

    #[test]
    fn inner_branch_perturbation_grows() {
        let g = Grid::uniform(201).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let reference = catenoid_profile(bp.c_in, g);
        let ep = shooting::eigenvalue(bp.c_in, 0, g).unwrap();
        assert!(ep.mu > 0.0);
        let mut u0 = reference.clone();
        for i in 1..200 {
            u0.values_mut()[i] += 1e-4 * ep.v[i];
        }
        let traj = evolve_until(
            &u0,
            10.0,
            1e-4,
            &sar_params(2.0, 0.0),
            &reference,
            Some(1e-2),
            None,
        )
        .unwrap();
        let last = *traj.norms.last().unwrap();
        assert!(last >= 10.0 * traj.norms[0], "growth {}", last / traj.norms[0]);
    }

    #[test]
    fn deep_inward_kick_touches_down() {
        let g = Grid::uniform(101).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let reference = catenoid_profile(bp.c_in, g);
        let mut u0 = reference.clone();
        for i in 1..100 {
            let z = g.node(i);
            u0.values_mut()[i] -= 0.18 * (1.0 - z * z);
        }
        let traj =
            evolve(&u0, 50.0, 1e-3, &sar_params(2.0, 0.0), &reference).unwrap();
        assert!(matches!(traj.event, Event::Touchdown { .. }));
    }
}
