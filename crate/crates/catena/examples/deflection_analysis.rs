//! Which way does a weak field push the film? Solve the linearized
//! sensitivity problem on the inner branch across slenderness regimes.
//!
//! Three regimes appear as sigma increases:
//!   - near the fold the whole film moves toward the axis (all negative),
//!   - past a first threshold the response changes sign twice, moving
//!     inward at the waist but outward near the rings,
//!   - the sign structure is predicted by a single integral I1(sigma)
//!     whose zero defines the threshold.
//!
//! Run with: cargo run --example deflection_analysis

use catena::deflection::{self, SignPattern};
use catena::geometry::Branch;
use catena::grid::Grid;
use catena::sar::Model;

fn main() -> catena::Result<()> {
    let grid = Grid::uniform(401)?;

    println!("{:>8} {:>12} {:>12} {:>24}", "sigma", "I1", "I4", "sign pattern");
    for sigma in [1.52, 1.6, 1.8, 2.0, 2.5, 4.0, 10.0] {
        let rep = deflection::analyze(sigma, Branch::Inner, Model::Sar, grid, 0)?;
        let pattern = match rep.sign_pattern {
            SignPattern::AllNegative => "inward everywhere".to_string(),
            SignPattern::AllPositive => "outward everywhere".to_string(),
            SignPattern::TwoSignChanges { r0 } => format!("crossings at z = ±{r0:.4}"),
            SignPattern::Other { sign_changes } => format!("{sign_changes} sign changes"),
        };
        println!("{sigma:>8.2} {:>12.6} {:>12.6} {pattern:>24}", rep.i1, rep.i4);
    }

    let (sigma_star, sigma_upper) = deflection::find_sigma_thresholds()?;
    println!();
    println!("I1 changes sign at sigma* = {sigma_star:.6}: below it the inner film");
    println!("deflects inward as one piece, above it the midsection and the edges");
    println!("move in opposite directions.");
    println!("I4 changes sign at sigma** = {sigma_upper:.6}, flipping the slope of");
    println!("the response at the rings.");

    // The outer branch never changes character: the field always pushes it
    // toward the electrode.
    let rep = deflection::analyze(5.0, Branch::Outer, Model::Sar, grid, 0)?;
    println!();
    println!("outer branch at sigma = 5: {:?}", rep.sign_pattern);
    Ok(())
}
