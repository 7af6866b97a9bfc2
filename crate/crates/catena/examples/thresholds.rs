//! Locate the two slenderness thresholds that organize the response of the
//! inner branch to a weak field, by scanning the criterion integrals.
//!
//! I1(sigma) weights the force against the fold eigenfunction and decides
//! whether the waist moves inward or the response splits into regions of
//! opposite sign. I4(sigma) controls the slope of the response at the
//! supporting rings.
//!
//! Run with: cargo run --example thresholds

use catena::deflection;
use catena::geometry;
use catena::par;

fn main() -> catena::Result<()> {
    let lo = geometry::sigma_crit() + 1e-3;
    let hi = 20.0;
    let n = 25;
    let sigmas: Vec<f64> = (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect();

    // The integrals at different sigma are independent: evaluate in parallel
    // (thread count respects the CATENA_THREADS environment variable).
    let rows = par::parallel_map(&sigmas, |&s| -> catena::Result<(f64, f64)> {
        Ok((deflection::criterion_integral(s)?.1, deflection::i4(s)?))
    });

    println!("{:>10} {:>12} {:>12}", "sigma", "I1", "I4");
    for (s, r) in sigmas.iter().zip(rows) {
        let (i1, i4) = r?;
        println!("{s:>10.4} {i1:>12.6} {i4:>12.6}");
    }

    let (sigma_star, sigma_upper) = deflection::find_sigma_thresholds()?;
    println!();
    println!("I1 = 0 at sigma*  = {sigma_star:.6}");
    println!("I4 = 0 at sigma** = {sigma_upper:.6}");
    println!("ordering: sigma_crit {:.6} < sigma* < sigma**", geometry::sigma_crit());
    Ok(())
}
