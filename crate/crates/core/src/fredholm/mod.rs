//! Fredholm determinants of restricted kernels by Nyström discretization.

pub mod det;
pub mod operator;
pub mod probabilities;
pub mod quadrature;

pub use operator::{BlockOperator, DiscretizedOperator, LineCoupling};
pub use probabilities::{
    correlation_f, decorrelation_e, decorrelation_e_survival, default_length, joint_cdf, joint_cdf_decorrelated,
    joint_cdf_raw, single_line_cdf, single_line_cdf_raw, single_line_survival, trace_bounds, tracy_widom_cdf,
    tracy_widom_cdf_relative, tracy_widom_survival, GridParams, TraceBounds, MAX_CERTIFIED_U,
};
pub use quadrature::{build_grid, composite_grid, gauss_legendre, QuadratureGrid};
