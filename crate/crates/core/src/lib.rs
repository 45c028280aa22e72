//! Numerics for the GUE minor (corners) process.
//!
//! * [`special`]: Hermite wave functions of every integer index, Airy, normal tails.
//! * [`kernel`]: the minor-process kernel, its edge-scaled forms, a contour
//!   oracle and the Airy kernel.
//! * [`fredholm`]: Nyström discretization and Fredholm determinants on one or
//!   two lines, Tracy–Widom, trace bounds.
//! * [`sim`]: coupled largest-eigenvalue paths of nested GUE minors.
//! * [`experiments`]: sweeps and reproducible reports tying the above together.

pub mod error;
pub mod experiments;
pub mod fredholm;
pub mod kernel;
pub mod par;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
pub use par::Parallelism;
