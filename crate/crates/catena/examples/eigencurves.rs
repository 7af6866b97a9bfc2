//! Trace the first two Sturm-Liouville eigenvalues of the linearized film
//! operator along the catenary family, and locate the fold.
//!
//! The principal eigenvalue mu_0(c) crosses zero exactly at c_crit: shapes
//! with c < c_crit (outer branch) are energy minima, shapes with c > c_crit
//! (inner branch) are saddle points with one unstable direction.
//!
//! Run with: cargo run --example eigencurves

use catena::grid::Grid;
use catena::{geometry, shooting};

fn main() -> catena::Result<()> {
    let grid = Grid::uniform(801)?;

    println!("{:>6} {:>12} {:>12}", "c", "mu_0", "mu_1");
    for k in 0..=20 {
        let c = 0.5 + 2.0 * k as f64 / 20.0;
        let mu0 = shooting::eigenvalue(c, 0, grid)?.mu;
        let mu1 = shooting::eigenvalue(c, 1, grid)?.mu;
        println!("{c:>6.3} {mu0:>12.6} {mu1:>12.6}");
    }

    let (c_zero, slope) = shooting::first_eigencurve_zero(0.5, 2.5, grid)?;
    println!();
    println!("mu_0 crosses zero at c = {c_zero:.8} with slope {slope:.4}");
    println!("c_crit                 = {:.8}", geometry::solve_c_crit());
    println!("difference             = {:.2e}", (c_zero - geometry::solve_c_crit()).abs());
    Ok(())
}
