use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use serde::{Deserialize, Serialize};

/// A real number with an unbounded binary exponent.
///
/// Hermite normalizers and Gaussian weights leave the `f64` range long before
/// the indices used by the minor kernel do, so every special function here
/// returns this representation and callers decode only ratios or products
/// that are known to be of moderate size.
///
/// Stored as `mantissa * 2^exponent` with `0.5 <= |mantissa| < 1`; the sign
/// and natural-log magnitude are exposed through [`sign`](Self::sign) and
/// [`log_magnitude`](Self::log_magnitude). Zero is the unique value with a
/// zero mantissa and its log magnitude is `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaledValue {
    mantissa: f64,
    exponent: i64,
}

impl LogScaledValue {
    pub const ZERO: Self = Self {
        mantissa: 0.0,
        exponent: 0,
    };

    pub const ONE: Self = Self {
        mantissa: 0.5,
        exponent: 1,
    };

    fn normalized(mantissa: f64, exponent: i64) -> Self {
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        debug_assert!(mantissa.is_finite(), "non-finite mantissa {mantissa}");
        let (m, e) = libm::frexp(mantissa);
        Self {
            mantissa: m,
            exponent: exponent + i64::from(e),
        }
    }

    /// Builds `sign * exp(log_magnitude)`. A zero sign or a `-inf` magnitude
    /// collapse to zero.
    pub fn new(sign: i8, log_magnitude: f64) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        assert!(log_magnitude.is_finite(), "log magnitude {log_magnitude}");
        let e = (log_magnitude / std::f64::consts::LN_2).floor();
        let m = (log_magnitude - e * std::f64::consts::LN_2).exp();
        Self::normalized(f64::from(sign.signum()) * m, e as i64)
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot log-scale {x}");
        Self::normalized(x, 0)
    }

    /// `exp(log_magnitude)`.
    pub fn from_log(log_magnitude: f64) -> Self {
        Self::new(1, log_magnitude)
    }

    pub fn sign(self) -> i8 {
        if self.mantissa > 0.0 {
            1
        } else if self.mantissa < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Natural log of the absolute value; `-inf` for zero.
    pub fn log_magnitude(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2
        }
    }

    /// `(mantissa, binary exponent)` with `0.5 <= |mantissa| < 1`.
    pub fn to_parts(self) -> (f64, i64) {
        (self.mantissa, self.exponent)
    }

    /// `mantissa · 2^exponent` for any finite mantissa.
    pub fn from_parts(mantissa: f64, exponent: i64) -> Self {
        Self::normalized(mantissa, exponent)
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    /// Decodes to `f64`, saturating to `±inf` or flushing to zero outside the
    /// representable range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let e = self.exponent.clamp(-2200, 2200) as i32;
        libm::ldexp(self.mantissa, e)
    }

    pub fn abs(self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiplies by `exp(shift)`.
    pub fn scale_log(self, shift: f64) -> Self {
        self * Self::from_log(shift)
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Self::normalized(1.0 / self.mantissa, -self.exponent)
    }

    /// Signed sum.
    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= other.exponent {
            (self, other)
        } else {
            (other, self)
        };
        let shift = small.exponent - big.exponent;
        if shift < -1100 {
            return big;
        }
        Self::normalized(
            big.mantissa + libm::ldexp(small.mantissa, shift as i32),
            big.exponent,
        )
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(-other)
    }

    /// Compares absolute values.
    pub fn cmp_magnitude(self, other: Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.exponent.cmp(&other.exponent).then(
                self.mantissa
                    .abs()
                    .partial_cmp(&other.mantissa.abs())
                    .unwrap_or(Ordering::Equal),
            ),
        }
    }
}

impl Default for LogScaledValue {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Neg for LogScaledValue {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for LogScaledValue {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self::normalized(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for LogScaledValue {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl From<f64> for LogScaledValue {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Display for LogScaledValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let decimal = self.log_magnitude() / std::f64::consts::LN_10;
        let exponent = decimal.floor();
        let mantissa = 10f64.powf(decimal - exponent) * f64::from(self.sign());
        write!(f, "{mantissa:.12}e{exponent}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_canonical() {
        let z = LogScaledValue::new(1, f64::NEG_INFINITY);
        assert_eq!(z, LogScaledValue::ZERO);
        assert_eq!(LogScaledValue::from_f64(0.0).log_magnitude(), f64::NEG_INFINITY);
        assert_eq!(LogScaledValue::from_f64(-0.0).sign(), 0);
        assert_eq!(LogScaledValue::new(0, 3.0), LogScaledValue::ZERO);
    }

    #[test]
    fn add_cancels_exactly() {
        let a = LogScaledValue::from_f64(3.5);
        assert!(a.sub(a).is_zero());
        let s = a.add(LogScaledValue::from_f64(-1.5)).to_f64();
        assert_eq!(s, 2.0);
    }

    #[test]
    fn huge_products_stay_finite() {
        let big = LogScaledValue::from_log(5000.0);
        let small = LogScaledValue::from_log(-4999.0);
        assert!(((big * small).to_f64() - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(big.to_f64(), f64::INFINITY);
        assert_eq!(small.to_f64(), 0.0);
    }

    #[test]
    fn log_magnitude_matches_ln() {
        let v = LogScaledValue::from_f64(-1234.5);
        assert_eq!(v.sign(), -1);
        assert!((v.log_magnitude() - 1234.5f64.ln()).abs() < 1e-14);
        let w = LogScaledValue::new(-1, 2000.25);
        assert!((w.log_magnitude() - 2000.25).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL) {
            prop_assert_eq!(LogScaledValue::from_f64(x).to_f64(), x);
        }

        #[test]
        fn add_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let s = LogScaledValue::from_f64(a).add(LogScaledValue::from_f64(b)).to_f64();
            prop_assert_eq!(s, a + b);
        }

        #[test]
        fn mul_matches_f64(a in -1e100f64..1e100, b in -1e100f64..1e100) {
            let p = (LogScaledValue::from_f64(a) * LogScaledValue::from_f64(b)).to_f64();
            prop_assert_eq!(p, a * b);
        }
    }
}
