//! Sweep the slenderness parameter and print both catenary branches.
//!
//! For each sigma above the critical value there are two catenoid-shaped
//! film profiles: a shallow outer one and a deep inner one. They merge at
//! sigma_crit and below it no stationary film exists.
//!
//! Run with: cargo run --example catenoid_branches

use catena::geometry::{self, catenoid_profile, solve_branches};
use catena::grid::Grid;

fn main() -> catena::Result<()> {
    println!("sigma_crit = {:.8}  (c_crit = {:.8})", geometry::sigma_crit(), geometry::solve_c_crit());
    println!();
    println!("{:>8} {:>10} {:>10} {:>12} {:>12} {:>12} {:>12}",
        "sigma", "c_out", "c_in", "midgap_out", "midgap_in", "E_out", "E_in");
    let grid = Grid::uniform(201)?;
    for sigma in [1.51, 1.6, 2.0, 3.0, 5.0, 10.0] {
        let bp = solve_branches(sigma)?;
        let u_out = catenoid_profile(bp.c_out, grid);
        let u_in = catenoid_profile(bp.c_in, grid);
        let mid = grid.n() / 2;
        println!(
            "{sigma:>8.2} {:>10.6} {:>10.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            bp.c_out,
            bp.c_in,
            u_out.values()[mid] + 1.0,
            u_in.values()[mid] + 1.0,
            geometry::surface_energy(&u_out, sigma),
            geometry::surface_energy(&u_in, sigma),
        );
    }
    println!();
    println!("The outer branch stays close to the cylinder u = 0; the inner one");
    println!("necks down toward the axis as sigma grows, and always carries the");
    println!("higher surface energy.");

    // Below the fold there is no solution at all.
    match solve_branches(1.4) {
        Err(e) => println!("\nsigma = 1.4: {e}"),
        Ok(_) => unreachable!("no branch exists below sigma_crit"),
    }
    Ok(())
}
