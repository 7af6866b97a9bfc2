//! Free boundary model: electrostatic potential between film and cylinder,
//! boundary-flux force extraction, and stationary solves that couple the
//! potential into the film equation.
//!
//! The annular gap { u(z)+1 <= r <= 2 } is mapped onto the fixed rectangle
//! [-1,1] x [0,1] by the log-radial coordinate
//! eta = ln(r/rho(z)) / ln(2/rho(z)), rho = u + 1, which turns the radial
//! part of (1/r) d_r(r d_r psi) + sigma^2 d_zz psi = 0 into a pure second
//! derivative (the cylindrical 1/r term is absorbed by the logarithm) and
//! makes z-independent potentials linear in eta, hence exactly representable.
//! The mapped equation keeps sigma^2-weighted mixed and first-order terms
//! through eta_z and eta_zz; everything is discretized by second-order
//! centered differences and solved by banded LU.

use crate::error::{Error, Result};
use crate::grid::{Grid, Profile, EPS_GAP};
use crate::linalg::Banded;
use crate::sar::{self, ContinuationCurve, ForceField};
use crate::geometry::Branch;

/// Potential values on the mapped rectangle, stored row-major with the
/// z-index outermost: `psi[i * n_eta + j]` at (z_i, eta_j).
#[derive(Debug, Clone)]
pub struct PotentialGrid {
    pub profile: Profile,
    pub n_z: usize,
    pub n_eta: usize,
    pub psi: Vec<f64>,
}

impl PotentialGrid {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.psi[i * self.n_eta + j]
    }

    pub fn h_eta(&self) -> f64 {
        1.0 / (self.n_eta - 1) as f64
    }
}

/// Exact potential of the fringing-field-free side condition:
/// ln(r/rho) / ln(2/rho) at height z.
pub fn boundary_data(u: &Profile, z: f64, r: f64) -> Result<f64> {
    let grid = u.grid();
    let i = (((z + 1.0) / grid.h()).round() as usize).min(grid.n() - 1);
    let rho = u.values()[i] + 1.0;
    if !(rho > EPS_GAP) {
        return Err(Error::SingularGap { node: i, eps: EPS_GAP });
    }
    Ok((r / rho).ln() / (2.0 / rho).ln())
}

struct MapCoeffs {
    rho: Vec<f64>,
    drho: Vec<f64>,
    ddrho: Vec<f64>,
}

fn map_coeffs(u: &Profile) -> Result<MapCoeffs> {
    let n = u.n();
    let h = u.grid().h();
    let v = u.values();
    let mut rho = Vec::with_capacity(n);
    for (i, &ui) in v.iter().enumerate() {
        let g = ui + 1.0;
        if !(g > EPS_GAP) || g >= 2.0 - EPS_GAP {
            return Err(Error::SingularGap { node: i, eps: EPS_GAP });
        }
        rho.push(g);
    }
    let drho: Vec<f64> = (0..n).map(|i| u.slope(i)).collect();
    let mut ddrho = vec![0.0; n];
    for i in 1..n - 1 {
        ddrho[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
    }
    Ok(MapCoeffs { rho, drho, ddrho })
}

/// Solves the mapped potential equation with Dirichlet data psi = 0 on the
/// film (eta = 0), psi = 1 on the cylinder (eta = 1), and the logarithmic
/// side profiles at z = +-1.
pub fn solve_potential(u: &Profile, sigma: f64, n_eta: usize) -> Result<PotentialGrid> {
    assert!(n_eta >= 3);
    let grid = u.grid();
    let n_z = grid.n();
    let hz = grid.h();
    let he = 1.0 / (n_eta - 1) as f64;
    let mc = map_coeffs(u)?;
    let s2 = sigma * sigma;

    // the side data ln(r/rho)/ln(2/rho) is the eta coordinate itself
    let boundary = |_i: usize, j: usize| -> f64 {
        if j == n_eta - 1 {
            1.0
        } else {
            j as f64 * he
        }
    };

    let m_eta = n_eta - 2;
    let m_z = n_z - 2;
    let nun = m_eta * m_z;
    let band = m_eta + 1;
    let mut a = Banded::zeros(nun, band, band);
    let mut b = vec![0.0; nun];

    let unk = |i: usize, j: usize| (i - 1) * m_eta + (j - 1);

    // stencil accumulator: interior neighbours go into the matrix, boundary
    // neighbours into the right-hand side
    let add = |a: &mut Banded, b: &mut Vec<f64>, k: usize, i: usize, j: usize, w: f64| {
        if i == 0 || i == n_z - 1 || j == 0 || j == n_eta - 1 {
            b[k] -= w * boundary(i, j);
        } else {
            a.add(k, unk(i, j), w);
        }
    };

    for i in 1..n_z - 1 {
        let rho = mc.rho[i];
        let l = (2.0 / rho).ln();
        let q = mc.drho[i] / rho;
        let dq = mc.ddrho[i] / rho - q * q;
        for j in 1..n_eta - 1 {
            let eta = j as f64 * he;
            let r = rho * (eta * l).exp();
            let eta_r = 1.0 / (r * l);
            let eta_z = -q * (1.0 - eta) / l;
            let eta_zz = -(1.0 - eta) * (dq / l + 2.0 * q * q / (l * l));
            let a_ee = eta_r * eta_r + s2 * eta_z * eta_z;
            let a_ze = 2.0 * s2 * eta_z;
            let a_e = s2 * eta_zz;
            let k = unk(i, j);

            add(&mut a, &mut b, k, i, j, -2.0 * a_ee / (he * he) - 2.0 * s2 / (hz * hz));
            add(&mut a, &mut b, k, i, j + 1, a_ee / (he * he) + a_e / (2.0 * he));
            add(&mut a, &mut b, k, i, j - 1, a_ee / (he * he) - a_e / (2.0 * he));
            add(&mut a, &mut b, k, i + 1, j, s2 / (hz * hz));
            add(&mut a, &mut b, k, i - 1, j, s2 / (hz * hz));
            let w_cross = a_ze / (4.0 * hz * he);
            add(&mut a, &mut b, k, i + 1, j + 1, w_cross);
            add(&mut a, &mut b, k, i + 1, j - 1, -w_cross);
            add(&mut a, &mut b, k, i - 1, j + 1, -w_cross);
            add(&mut a, &mut b, k, i - 1, j - 1, w_cross);
        }
    }

    let x = a.solve(&b)?;

    let mut psi = vec![0.0; n_z * n_eta];
    for i in 0..n_z {
        for j in 0..n_eta {
            psi[i * n_eta + j] = if i == 0 || i == n_z - 1 || j == 0 || j == n_eta - 1 {
                boundary(i, j)
            } else {
                x[unk(i, j)]
            };
        }
    }
    Ok(PotentialGrid { profile: u.clone(), n_z, n_eta, psi })
}

/// Force density on the film: g_i = (1 + sigma^2 u_z^2)^{3/2} |d_r psi|^2,
/// with the normal flux from a second-order one-sided difference at eta = 0.
pub fn electrostatic_force(u: &Profile, psi: &PotentialGrid, sigma: f64) -> Result<ForceField> {
    let grid = u.grid();
    let n = grid.n();
    assert_eq!(psi.n_z, n);
    let he = psi.h_eta();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let rho = u.values()[i] + 1.0;
        if !(rho > EPS_GAP) {
            return Err(Error::SingularGap { node: i, eps: EPS_GAP });
        }
        let dpsi_deta =
            (-3.0 * psi.at(i, 0) + 4.0 * psi.at(i, 1) - psi.at(i, 2)) / (2.0 * he);
        let dpsi_dr = dpsi_deta / (rho * (2.0 / rho).ln());
        let s = u.slope(i);
        values.push((1.0 + sigma * sigma * s * s).powf(1.5) * dpsi_dr * dpsi_dr);
    }
    Ok(ForceField { grid, values })
}

/// Convenience wrapper: potential solve followed by flux extraction.
pub fn gfbp(u: &Profile, sigma: f64, n_eta: usize) -> Result<ForceField> {
    let psi = solve_potential(u, sigma, n_eta)?;
    electrostatic_force(u, &psi, sigma)
}

/// Stationary free boundary solve. The residual couples the true
/// electrostatic force through a fresh potential solve per evaluation; the
/// Newton correction uses the closed-form force linearization as a surrogate
/// Jacobian, which the line search keeps honest at the lambda sizes where
/// the branch exists.
pub fn solve_stationary_fbp(
    sigma: f64,
    lambda: f64,
    init: &Profile,
    n_eta: usize,
) -> Result<Profile> {
    sar::newton_solve(init, 1e-8, 50, |u| {
        let g = gfbp(u, sigma, n_eta)?;
        let r = sar::residual_with_force(u, sigma, lambda, &g)?;
        let j = sar::jacobian(u, sigma, lambda)?;
        Ok((r, j))
    })
}

pub fn continue_in_lambda_fbp(
    sigma: f64,
    branch: Branch,
    lambda_max: f64,
    steps: usize,
    grid: Grid,
    n_eta: usize,
) -> Result<ContinuationCurve> {
    sar::continue_with(sigma, branch, lambda_max, steps, grid, |lam, init| {
        solve_stationary_fbp(sigma, lam, init, n_eta)
    })
}

/// Default eta resolution for a given z resolution.
pub fn default_n_eta(n_z: usize) -> usize {
    (n_z + 1) / 2 + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catenoid_profile, solve_branches};
    use crate::sar::max_abs;

    fn constant_profile(n: usize, u0: f64) -> Profile {
        let g = Grid::uniform(n).unwrap();
        Profile::new_unchecked(g, vec![u0; n])
    }

    #[test]
    fn boundary_data_values() {
        let g = Grid::uniform(101).unwrap();
        let u = Profile::flat(g);
        assert_eq!(boundary_data(&u, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(boundary_data(&u, 0.5, 2.0).unwrap(), 1.0);
        let half = boundary_data(&u, -1.0, 2f64.sqrt()).unwrap();
        assert!((half - 0.5).abs() < 1e-14);
    }

    fn constant_potential_error(n_z: usize, n_eta: usize, u0: f64, sigma: f64) -> f64 {
        let u = constant_profile(n_z, u0);
        let psi = solve_potential(&u, sigma, n_eta).unwrap();
        let rho = u0 + 1.0;
        let l = (2.0 / rho).ln();
        let he = psi.h_eta();
        let mut err = 0.0f64;
        for i in 0..n_z {
            for j in 0..n_eta {
                let r = rho * (j as f64 * he * l).exp();
                let exact = (r / rho).ln() / l;
                err = err.max((psi.at(i, j) - exact).abs());
            }
        }
        err
    }

    #[test]
    fn constant_profile_potential_is_discretely_exact() {
        for &u0 in &[-0.5, 0.0, 0.5] {
            let e = constant_potential_error(51, 26, u0, 2.0);
            assert!(e < 1e-11, "u0 = {u0}: error {e}");
        }
    }

    #[test]
    fn catenoid_potential_symmetric_and_bounded() {
        let g = Grid::uniform(101).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let u = catenoid_profile(bp.c_out, g);
        let psi = solve_potential(&u, 2.0, 51).unwrap();
        for i in 0..psi.n_z {
            for j in 0..psi.n_eta {
                let v = psi.at(i, j);
                assert!(v >= -1e-12 && v <= 1.0 + 1e-12);
                let sym = psi.at(psi.n_z - 1 - i, j);
                assert!((v - sym).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn force_matches_closed_form_on_cylinders() {
        for &u0 in &[-0.5, 0.0, 0.5] {
            let rho = u0 + 1.0;
            let exact = 1.0 / (rho * rho * (2.0f64 / rho).ln().powi(2));
            for &(nz, ne) in &[(65usize, 33usize), (129, 65), (257, 129)] {
                let u = constant_profile(nz, u0);
                let f = gfbp(&u, 2.0, ne).unwrap();
                let e = f.values.iter().fold(0.0f64, |a, &v| a.max((v - exact).abs()));
                assert!(e <= 1e-11, "u0 = {u0}, n = {nz}: error {e}");
            }
        }
    }

    #[test]
    fn force_positive_and_symmetric_on_catenoid() {
        let g = Grid::uniform(101).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let u = catenoid_profile(bp.c_in, g);
        let f = gfbp(&u, 2.0, 51).unwrap();
        for i in 0..101 {
            assert!(f.values[i] > 0.0);
            assert!((f.values[i] - f.values[100 - i]).abs() < 1e-8);
        }
    }

    #[test]
    fn stationary_fbp_at_zero_lambda_recovers_catenoid() {
        let g = Grid::uniform(101).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let exact = catenoid_profile(bp.c_out, g);
        let mut init = exact.clone();
        for i in 1..100 {
            let z = g.node(i);
            init.values_mut()[i] += 1e-3 * (1.0 - z * z);
        }
        let sol = solve_stationary_fbp(2.0, 0.0, &init, 51).unwrap();
        assert!(sol.max_distance(&exact) <= 1e-7);
    }

    #[test]
    fn stationary_fbp_small_lambda_residual_and_symmetry() {
        let g = Grid::uniform(101).unwrap();
        let bp = solve_branches(2.0).unwrap();
        let init = catenoid_profile(bp.c_out, g);
        let sol = solve_stationary_fbp(2.0, 0.02, &init, 51).unwrap();
        let gf = gfbp(&sol, 2.0, 51).unwrap();
        let r = sar::residual_with_force(&sol, 2.0, 0.02, &gf).unwrap();
        assert!(max_abs(&r) <= 1e-8);
        assert!(sol.symmetry_error() <= 1e-7);
        // voltage pushes the outer film outward
        for i in 1..100 {
            assert!(sol.values()[i] > init.values()[i]);
        }
    }
}
