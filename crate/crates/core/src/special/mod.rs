//! Special functions with overflow-free evaluation.

pub mod airy;
pub mod hermite;
pub mod logscaled;
pub mod normal;

pub use airy::{airy_ai, airy_ai_pair, airy_ai_prime};
pub use hermite::{hermite_functions, ln_hermite_norm, phi, phi_range, psi, psi_range};
pub use logscaled::LogScaledValue;
pub use normal::{ln_erfc, normal_cdf, normal_sf};
