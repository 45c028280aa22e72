//! Airy function `Ai` on `[-30, ∞)`.
//!
//! Values come from a table of `(Ai, Ai')` on a half-unit lattice, expanded
//! locally by the Taylor series of `y'' = xy`. The table is integrated away
//! from two anchors: the exact values at the origin (leftward, through the
//! oscillatory region) and the asymptotic expansion at `x = 12` (leftward
//! again, which is the stable direction for the recessive solution).
//! Beyond `x = 12` the asymptotic expansion is used directly; its truncation
//! error there is below `e^{-2ζ} < 1e-24` relative.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_239_26;
/// `Ai'(0) = -3^{-1/3} / Γ(1/3)`.
pub const AI_PRIME_ZERO: f64 = -0.258_819_403_792_806_798_41;

pub const AIRY_LOWER_LIMIT: f64 = -30.0;

const STEP: f64 = 0.5;
const ASYMPTOTIC_FROM: f64 = 12.0;
const TABLE_LOW: f64 = -31.0;

struct AiryTable {
    values: Vec<(f64, f64)>,
}

impl AiryTable {
    fn index_of(x: f64) -> usize {
        ((x - TABLE_LOW) / STEP).round() as usize
    }

    fn node(i: usize) -> f64 {
        TABLE_LOW + i as f64 * STEP
    }

    fn build() -> Self {
        let n = ((ASYMPTOTIC_FROM - TABLE_LOW) / STEP).round() as usize + 1;
        let mut values = vec![(0.0, 0.0); n];
        let zero = Self::index_of(0.0);
        values[zero] = (AI_ZERO, AI_PRIME_ZERO);
        for i in (0..zero).rev() {
            values[i] = taylor_step(Self::node(i + 1), values[i + 1], -STEP);
        }
        let top = n - 1;
        values[top] = asymptotic_positive(ASYMPTOTIC_FROM);
        for i in (zero + 1..top).rev() {
            values[i] = taylor_step(Self::node(i + 1), values[i + 1], -STEP);
        }
        Self { values }
    }
}

fn table() -> &'static AiryTable {
    static TABLE: OnceLock<AiryTable> = OnceLock::new();
    TABLE.get_or_init(AiryTable::build)
}

/// Advances `(y, y')` of `y'' = xy` from `center` by `h`.
fn taylor_step(center: f64, (y0, y1): (f64, f64), h: f64) -> (f64, f64) {
    // a_{n+2} = (c a_n + a_{n-1}) / ((n+2)(n+1))
    let mut a_prev2 = 0.0; // a_{n-1}
    let mut a_prev = y0; // a_n, n = 0
    let mut a_cur = y1; // a_{n+1}
    let mut value = y0 + y1 * h;
    let mut deriv = y1;
    let mut hp = h; // h^{n+1}
    let mut small_run = 0;
    for n in 0..200usize {
        let nf = n as f64;
        let a_next = (center * a_prev + a_prev2) / ((nf + 2.0) * (nf + 1.0));
        let term_deriv = (nf + 2.0) * a_next * hp;
        hp *= h;
        let term = a_next * hp;
        value += term;
        deriv += term_deriv;
        if term.abs() <= 1e-18 * value.abs().max(1e-300) && term_deriv.abs() <= 1e-18 * deriv.abs().max(1e-300) {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        a_prev2 = a_prev;
        a_prev = a_cur;
        a_cur = a_next;
    }
    (value, deriv)
}

/// `(Ai(x), Ai'(x))` from the large-`x` expansion.
fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let prefactor = (-zeta).exp() / (2.0 * PI.sqrt());
    if prefactor == 0.0 {
        return (0.0, 0.0);
    }
    let mut u = 1.0;
    let mut sum_u = 1.0;
    let mut sum_v = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let scale = zeta.powi(-(k as i32)) * if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = u * scale;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        sum_u += term;
        sum_v += v * scale;
        if term.abs() < 1e-18 {
            break;
        }
    }
    let q = x.powf(0.25);
    (prefactor / q * sum_u, -prefactor * q * sum_v)
}

/// `(Ai(x), Ai'(x))`.
pub fn airy_ai_pair(x: f64) -> Result<(f64, f64)> {
    if !(x >= AIRY_LOWER_LIMIT) || !x.is_finite() {
        return Err(Error::Domain {
            what: "airy argument",
            value: x,
            domain: "[-30, inf)",
        });
    }
    if x >= ASYMPTOTIC_FROM {
        return Ok(asymptotic_positive(x));
    }
    let tab = table();
    let i = AiryTable::index_of(x);
    let center = AiryTable::node(i);
    Ok(taylor_step(center, tab.values[i], x - center))
}

/// `Ai(x)` for `x >= -30`, absolute error below `1e-12`.
pub fn airy_ai(x: f64) -> Result<f64> {
    airy_ai_pair(x).map(|p| p.0)
}

/// `Ai'(x)` for `x >= -30`.
pub fn airy_ai_prime(x: f64) -> Result<f64> {
    airy_ai_pair(x).map(|p| p.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series with Gamma-function coefficients:
    /// Ai(x) = c1 f(x) − c2 g(x), f = Σ 3^k (1/3)_k x^{3k}/(3k)!, g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!.
    fn maclaurin(x: f64) -> f64 {
        let c1 = AI_ZERO;
        let c2 = -AI_PRIME_ZERO;
        let (mut f, mut g) = (1.0, x);
        let (mut tf, mut tg) = (1.0, x);
        for k in 1..80 {
            let kf = k as f64;
            tf *= x * x * x / ((3.0 * kf - 1.0) * (3.0 * kf));
            tg *= x * x * x / ((3.0 * kf) * (3.0 * kf + 1.0));
            f += tf;
            g += tg;
        }
        c1 * f - c2 * g
    }

    #[test]
    fn origin_matches_series() {
        assert!((airy_ai(0.0).unwrap() - maclaurin(0.0)).abs() < 1e-15);
    }

    #[test]
    fn small_arguments_match_series() {
        for i in -20..=20 {
            let x = i as f64 * 0.1;
            let err = (airy_ai(x).unwrap() - maclaurin(x)).abs();
            assert!(err < 1e-13, "x={x} err={err}");
        }
    }

    #[test]
    fn anchors_agree_at_origin() {
        // The positive half of the table is integrated down from x = 12.
        let t = table();
        let from_right = taylor_step(0.5, t.values[AiryTable::index_of(0.5)], -0.5);
        assert!((from_right.0 - AI_ZERO).abs() < 1e-14, "{}", from_right.0);
        assert!((from_right.1 - AI_PRIME_ZERO).abs() < 1e-14);
    }

    #[test]
    fn reference_values() {
        // 30-digit reference evaluations.
        let cases = [
            (1.0, 0.135_292_416_312_881_415_524),
            (-1.0, 0.535_560_883_292_352_118_800),
            (2.0, 0.034_924_130_423_274_379_135_3),
            (-5.0, 0.350_761_009_024_114_319_788),
            (-10.0, 0.040_241_238_486_443_190_689),
            (5.0, 1.083_444_281_360_744_173_5e-4),
            (-30.0, -0.087_968_188_456_842_162_833),
        ];
        for (x, v) in cases {
            let got = airy_ai(x).unwrap();
            assert!((got - v).abs() < 1e-12, "Ai({x}) = {got}, want {v}");
        }
    }

    #[test]
    fn far_right_is_negligible() {
        assert!(airy_ai(20.0).unwrap() < 1e-25);
        assert!(airy_ai(20.0).unwrap() > 0.0);
        assert_eq!(airy_ai(200.0).unwrap(), 0.0);
    }

    #[test]
    fn normalized_decay_is_bounded() {
        for i in 0..=190 {
            let x = 1.0 + i as f64 * 0.1;
            let r = airy_ai(x).unwrap() * x.powf(0.25) * (2.0 / 3.0 * x.powf(1.5)).exp();
            let target = 1.0 / (2.0 * PI.sqrt());
            assert!(r > 0.9 * target && r < target, "x={x} ratio={r}");
        }
    }

    #[test]
    fn rejects_far_left() {
        assert!(matches!(airy_ai(-30.5), Err(Error::Domain { .. })));
        assert!(airy_ai(f64::NAN).is_err());
    }

    #[test]
    fn wronskian_like_identity() {
        // d/dx (Ai'² − x Ai²) = −Ai², checked by central differences.
        for &x in &[-12.0, -3.3, 0.7, 4.2] {
            let h = 1e-4;
            let q = |t: f64| {
                let (a, ap) = airy_ai_pair(t).unwrap();
                ap * ap - t * a * a
            };
            let lhs = (q(x + h) - q(x - h)) / (2.0 * h);
            let a = airy_ai(x).unwrap();
            assert!((lhs + a * a).abs() < 1e-7, "x={x}");
        }
    }
}
