//! Catenoid branch constants, exact catenoid profiles, and the surface-energy
//! diagnostic for the two-ring soap-film configuration.

use crate::error::{Error, Result};
use crate::grid::{slope_at, Grid, Profile};
use crate::quad::simpson;
use serde::Serialize;

/// Which of the two catenoid branches (for sigma above critical).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Inner,
    Outer,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Inner => "inner",
            Branch::Outer => "outer",
        }
    }
}

/// The pair of catenoid parameters for a given aspect ratio:
/// cosh(c)/c = sigma has roots c_out < c_crit < c_in.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BranchPair {
    pub sigma: f64,
    pub c_out: f64,
    pub c_in: f64,
    pub c_crit: f64,
    pub sigma_crit: f64,
}

impl BranchPair {
    pub fn c(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Inner => self.c_in,
            Branch::Outer => self.c_out,
        }
    }
}

fn crit_fn(c: f64) -> f64 {
    c * c.sinh() - c.cosh()
}

/// Unique root of c sinh(c) - cosh(c) on (0, inf), bracketed in [1, 2].
/// Bisection plus a Newton polish; |residual| <= 1e-14.
pub fn solve_c_crit() -> f64 {
    let (mut a, mut b) = (1.0f64, 2.0f64);
    debug_assert!(crit_fn(a) < 0.0 && crit_fn(b) > 0.0);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if crit_fn(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let mut c = 0.5 * (a + b);
    for _ in 0..4 {
        // d/dc [c sinh c - cosh c] = c cosh c
        c -= crit_fn(c) / (c * c.cosh());
    }
    c
}

/// sigma_crit = cosh(c_crit)/c_crit.
pub fn sigma_crit() -> f64 {
    let c = solve_c_crit();
    c.cosh() / c
}

fn branch_fn(c: f64, sigma: f64) -> f64 {
    c.cosh() / c - sigma
}

fn polish_branch_root(mut c: f64, sigma: f64) -> f64 {
    for _ in 0..6 {
        // d/dc [cosh c / c] = (c sinh c - cosh c)/c^2
        let deriv = crit_fn(c) / (c * c);
        if deriv.abs() < 1e-300 {
            break;
        }
        c -= branch_fn(c, sigma) / deriv;
    }
    c
}

/// Both roots of cosh(c)/c = sigma. Errors with NoSolution below sigma_crit;
/// returns the double root c_crit when sigma matches sigma_crit to 1e-12.
pub fn solve_branches(sigma: f64) -> Result<BranchPair> {
    let c_crit = solve_c_crit();
    let s_crit = c_crit.cosh() / c_crit;
    if sigma < s_crit - 1e-12 {
        return Err(Error::NoSolution { sigma, sigma_crit: s_crit });
    }
    if sigma <= s_crit + 1e-12 {
        return Ok(BranchPair { sigma, c_out: c_crit, c_in: c_crit, c_crit, sigma_crit: s_crit });
    }

    // outer root in (0, c_crit): cosh(c)/c decreases to the minimum at c_crit
    let mut a = c_crit;
    let mut lo = c_crit * 0.5;
    while branch_fn(lo, sigma) < 0.0 {
        lo *= 0.5;
        assert!(lo > 1e-300);
    }
    for _ in 0..80 {
        let m = 0.5 * (lo + a);
        if branch_fn(m, sigma) > 0.0 {
            lo = m;
        } else {
            a = m;
        }
    }
    let c_out = polish_branch_root(0.5 * (lo + a), sigma);

    // inner root in (c_crit, inf): grow the upper bracket geometrically
    let mut hi = 2.0 * c_crit;
    while branch_fn(hi, sigma) < 0.0 {
        hi *= 2.0;
        assert!(hi < 1e4, "inner bracket growth runaway");
    }
    let mut b = c_crit;
    for _ in 0..80 {
        let m = 0.5 * (b + hi);
        if branch_fn(m, sigma) < 0.0 {
            b = m;
        } else {
            hi = m;
        }
    }
    let c_in = polish_branch_root(0.5 * (b + hi), sigma);

    Ok(BranchPair { sigma, c_out, c_in, c_crit, sigma_crit: s_crit })
}

/// u(z) = cosh(cz)/cosh(c) - 1 sampled on the grid; endpoints vanish exactly.
pub fn catenoid_profile(c: f64, grid: Grid) -> Profile {
    assert!(c > 0.0);
    let cc = c.cosh();
    let values: Vec<f64> = grid.nodes().map(|z| (c * z).cosh() / cc - 1.0).collect();
    let mut values = values;
    let n = values.len();
    values[0] = 0.0;
    values[n - 1] = 0.0;
    Profile::new(grid, values).expect("catenoid samples satisfy Dirichlet ends")
}

/// Surface energy E_m(u) = int (u+1) sqrt(1 + sigma^2 u_z^2) dz by composite
/// Simpson on the profile's grid.
pub fn surface_energy(u: &Profile, sigma: f64) -> f64 {
    let grid = u.grid();
    let v = u.values();
    let integrand: Vec<f64> = (0..grid.n())
        .map(|i| {
            let s = slope_at(v, grid.h(), i);
            (v[i] + 1.0) * (1.0 + sigma * sigma * s * s).sqrt()
        })
        .collect();
    simpson(&integrand, grid.h())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_crit_value_and_residual() {
        let c = solve_c_crit();
        assert!((c - 1.19967864).abs() < 1e-6);
        assert!(crit_fn(c).abs() <= 1e-14);
        assert!((sigma_crit() - 1.50888).abs() < 1e-4);
    }

    #[test]
    fn branches_at_sigma_two() {
        let bp = solve_branches(2.0).unwrap();
        assert!((bp.c_out - 0.5894).abs() < 5e-4);
        assert!((bp.c_in - 2.1268).abs() < 5e-4);
        assert!(branch_fn(bp.c_out, 2.0).abs() <= 1e-12);
        assert!(branch_fn(bp.c_in, 2.0).abs() <= 1e-12);
    }

    #[test]
    fn no_branch_below_critical() {
        assert!(matches!(solve_branches(1.0), Err(Error::NoSolution { .. })));
    }

    #[test]
    fn critical_sigma_gives_double_root() {
        let bp = solve_branches(sigma_crit()).unwrap();
        assert_eq!(bp.c_out, bp.c_in);
        assert_eq!(bp.c_out, bp.c_crit);
    }

    #[test]
    fn flat_energy_is_two() {
        let g = Grid::uniform(101).unwrap();
        let u = Profile::flat(g);
        assert!((surface_energy(&u, 3.0) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn catenoid_midpoint_value() {
        let g = Grid::uniform(401).unwrap();
        let c = solve_c_crit();
        let u = catenoid_profile(c, g);
        let mid = u.values()[200];
        assert!((mid - (1.0 / c.cosh() - 1.0)).abs() < 1e-14);
        assert!((mid - (-0.4476)).abs() < 1e-4);
    }
}
