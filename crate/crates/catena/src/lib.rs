//! Electrostatically deflected soap-film bridges between coaxial rings:
//! catenoid branch structure, Sturm–Liouville stability spectra, stationary
//! solves of the small-aspect-ratio and free boundary models, deflection
//! direction criteria, and implicit-explicit time stepping.

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod par;
pub mod quad;
pub mod verify;

pub mod deflection;
pub mod dynamics;
pub mod geometry;
pub mod fbp;
pub mod sar;
pub mod shooting;

pub use error::{Error, Result};
pub use grid::{Grid, Profile, EPS_GAP};
