//! Solve the annular electrostatic potential between the film and the
//! outer cylinder, and compare the resulting surface force with the
//! closed-form expression available for catenoid-shaped films.
//!
//! Run with: cargo run --example potential_field

use catena::geometry::{catenoid_profile, solve_branches};
use catena::grid::Grid;
use catena::{fbp, sar};

fn main() -> catena::Result<()> {
    let sigma = 2.0;
    let grid = Grid::uniform(101)?;
    let bp = solve_branches(sigma)?;
    let u = catenoid_profile(bp.c_in, grid);

    let psi = fbp::solve_potential(&u, sigma, 51)?;
    println!("potential grid: {} x {} (axial x radial)", psi.n_z, psi.n_eta);

    // A few radial slices: psi runs from 0 on the film to 1 on the cylinder.
    println!("\n{:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "z", "eta=0", "0.25", "0.5", "0.75", "1");
    for &iz in &[0, 12, 25, 37, 50] {
        let row: Vec<f64> = [0, 12, 25, 37, 50]
            .iter()
            .map(|&j| psi.at(iz, j))
            .collect();
        println!(
            "{:>6.2} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            grid.node(iz), row[0], row[1], row[2], row[3], row[4]
        );
    }

    let force = fbp::electrostatic_force(&u, &psi, sigma)?;
    println!("\nsurface force on the inner catenoid:");
    println!("  at the waist  g = {:.6}", force.values[grid.n() / 2]);
    println!("  at the rings  g = {:.6}", force.values[0]);

    // For a film of constant radius the potential is exactly logarithmic in
    // the radius, so the numerical force can be checked in closed form.
    let mut flat = catenoid_profile(bp.c_in, grid);
    let rho = 0.5;
    flat.values_mut().iter_mut().for_each(|v| *v = rho - 1.0);
    let exact = 1.0 / (rho * rho * (2.0f64 / rho).ln().powi(2));
    let gflat = fbp::gfbp(&flat, sigma, 51)?;
    let worst = gflat.values.iter().fold(0.0f64, |a, &v| a.max((v - exact).abs()));
    println!("\ncylinder of radius {rho}: closed-form force {exact:.10}");
    println!("max |numerical - closed form| = {worst:.3e}");

    // Compare with the thin-film closure used by the reduced model.
    let gsar = sar::gsar(&u, sigma)?;
    println!("\nthin-film closure vs full field on the catenoid (waist):");
    println!("  g_sar = {:.6}, g_fbp = {:.6}", gsar.values[grid.n() / 2], force.values[grid.n() / 2]);
    Ok(())
}
