use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `Pr[Z > z]` for a standard normal `Z`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// `Pr[Z <= z]`.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Scaled complementary error function `e^{x²} erfc(x)` for `x >= 5`,
/// by the Laplace continued fraction evaluated bottom-up.
fn erfcx_large(x: f64) -> f64 {
    debug_assert!(x >= 5.0);
    // erfc(x) e^{x²} = (1/√π) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + 0.5 * k as f64 / tail;
    }
    1.0 / (PI.sqrt() * tail)
}

/// `ln erfc(x)`, finite for every finite `x`.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 5.0 {
        libm::erfc(x).ln()
    } else {
        -x * x + erfcx_large(x).ln()
    }
}
