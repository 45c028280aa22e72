//! Minor-process kernel, its scaled forms, a contour oracle and the Airy kernel.

pub mod airy_kernel;
pub mod contour;
pub mod coords;
pub mod minor;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::special::LogScaledValue;

pub use airy_kernel::{airy_kernel, airy_kernel_matrix};
pub use contour::kernel_contour_oracle;
pub use coords::{edge_stretch, from_scaled, scale_y, to_scaled, unscale_y, LinePoint, ScaledPoint};
pub use minor::{
    kernel_decorrelated, kernel_hermite_sum, kernel_raw, kernel_scaled, phi_transition, scale_factor_j,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    HermiteSum,
    ContourOracle,
}

/// A kernel evaluation request between two line points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub p1: LinePoint,
    pub p2: LinePoint,
    pub method: KernelMethod,
}

impl KernelQuery {
    pub fn evaluate(&self) -> Result<LogScaledValue> {
        match self.method {
            KernelMethod::HermiteSum => Ok(kernel_raw(self.p1.u, self.p1.y, self.p2.u, self.p2.y)),
            KernelMethod::ContourOracle => kernel_contour_oracle(self.p1.u, self.p1.y, self.p2.u, self.p2.y),
        }
    }
}
