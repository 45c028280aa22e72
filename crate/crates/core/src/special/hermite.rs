//! Hermite wave functions `Ψ_j(x) = e^{-x²} H_j(x)` (extended to negative `j`
//! by repeated integration from the right) and their biorthogonal partners
//! `Φ_j(x) = H_j(x) / 𝒩_j` with `𝒩_j = 2^j j! √π`.

use std::f64::consts::{LN_2, PI};

use super::logscaled::LogScaledValue;
use super::normal::ln_erfc;

/// Powers of two used to keep recurrence mantissas inside `f64`.
const RESCALE_UP: f64 = 1.0e150;
const RESCALE_EXP: i32 = 498; // 2^498 ≈ 1e150

/// `ln 𝒩_j = j ln 2 + ln j! + ½ ln π`.
pub fn ln_hermite_norm(j: usize) -> f64 {
    j as f64 * LN_2 + libm::lgamma(j as f64 + 1.0) + 0.5 * PI.ln()
}

/// A pair of consecutive recurrence values sharing one binary exponent.
#[derive(Clone, Copy)]
struct ScaledPair {
    prev: f64,
    cur: f64,
    exponent: i64,
}

impl ScaledPair {
    fn renormalize(&mut self) {
        let big = self.cur.abs().max(self.prev.abs());
        if big > RESCALE_UP {
            self.prev = libm::ldexp(self.prev, -RESCALE_EXP);
            self.cur = libm::ldexp(self.cur, -RESCALE_EXP);
            self.exponent += i64::from(RESCALE_EXP);
        } else if big < 1.0 / RESCALE_UP && big > 0.0 {
            self.prev = libm::ldexp(self.prev, RESCALE_EXP);
            self.cur = libm::ldexp(self.cur, RESCALE_EXP);
            self.exponent -= i64::from(RESCALE_EXP);
        }
    }

    fn current(&self) -> LogScaledValue {
        LogScaledValue::from_f64(self.cur) * pow2(self.exponent)
    }
}

fn pow2(e: i64) -> LogScaledValue {
    LogScaledValue::from_log(e as f64 * LN_2)
}

/// Orthonormal Hermite functions `h_j(x) = e^{-x²/2} H_j(x) / √𝒩_j` for
/// `j = 0..=n`.
///
/// Uses the normalized three-term recurrence, which is forward stable in
/// both the oscillatory and the decaying region.
pub fn hermite_functions(x: f64, n: usize) -> Vec<LogScaledValue> {
    let start = LogScaledValue::from_log(-0.5 * x * x - 0.25 * PI.ln());
    let mut out = Vec::with_capacity(n + 1);
    out.push(start);
    if n == 0 {
        return out;
    }
    // Carry mantissas relative to h_0.
    let mut pair = ScaledPair {
        prev: 0.0,
        cur: 1.0,
        exponent: 0,
    };
    for j in 0..n {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * pair.cur - (jf / (jf + 1.0)).sqrt() * pair.prev;
        pair.prev = pair.cur;
        pair.cur = next;
        pair.renormalize();
        out.push(pair.current() * start);
    }
    out
}

/// `Ψ_j(x)` for `j >= 0` from `h_j`.
fn psi_from_h(h: LogScaledValue, j: usize, x: f64) -> LogScaledValue {
    h.scale_log(-0.5 * x * x + 0.5 * ln_hermite_norm(j))
}

/// `Φ_j(x)` from `h_j`.
fn phi_from_h(h: LogScaledValue, j: usize, x: f64) -> LogScaledValue {
    h.scale_log(0.5 * x * x - 0.5 * ln_hermite_norm(j))
}

/// `Ψ_{-1-m}(x)` for `m = 0..=m_max`, i.e. the iterated right-tail integrals
/// `(1/m!) ∫_x^∞ (y-x)^m e^{-y²} dy`.
///
/// All integer indices obey `Ψ_{j+1} = 2xΨ_j − 2jΨ_{j-1}`. Descending in `j`
/// this is free of cancellation for `x <= 0`; for `x > 0` the wanted sequence
/// is the recessive solution, so it is generated by backward (Miller)
/// recurrence and normalized by `Ψ_{-1}(x) = (√π/2) erfc(x)`.
pub fn psi_negative(x: f64, m_max: usize) -> Vec<LogScaledValue> {
    let base = LogScaledValue::from_log(0.5 * PI.ln() - LN_2 + ln_erfc(x));
    let growth = 2.0 * x * (2.0 * (m_max as f64 + 1.0)).sqrt();
    if x <= 0.0 || growth <= 3.0 {
        psi_negative_forward(x, m_max, base)
    } else {
        psi_negative_miller(x, m_max, base)
    }
}

fn psi_negative_forward(x: f64, m_max: usize, base: LogScaledValue) -> Vec<LogScaledValue> {
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(base);
    let mut before = LogScaledValue::from_log(-x * x); // Ψ_0
    let mut cur = base;
    let two_x = LogScaledValue::from_f64(2.0 * x);
    for m in 0..m_max {
        let next = before.sub(two_x * cur) / LogScaledValue::from_f64(2.0 * (m as f64 + 1.0));
        before = cur;
        cur = next;
        out.push(cur);
    }
    out
}

fn psi_negative_miller(x: f64, m_max: usize, base: LogScaledValue) -> Vec<LogScaledValue> {
    let lead = (2.0 * m_max as f64).sqrt() + 20.0 / x;
    let start = ((0.5 * lead * lead).ceil() as usize).max(m_max + 30);
    // Walk m = start, start-1, ..., 0 with J_{m-1} = 2(m+1) J_{m+1} + 2x J_m.
    let mut pair = ScaledPair {
        prev: 0.0, // J_{m+1}
        cur: 1.0,  // J_m
        exponent: 0,
    };
    let mut stored = vec![LogScaledValue::ZERO; m_max + 1];
    if start <= m_max {
        stored[start] = pair.current();
    }
    for m in (1..=start).rev() {
        let lower = 2.0 * (m as f64 + 1.0) * pair.prev + 2.0 * x * pair.cur;
        pair.prev = pair.cur;
        pair.cur = lower;
        pair.renormalize();
        if m - 1 <= m_max {
            stored[m - 1] = pair.current();
        }
    }
    let scale = base / stored[0];
    stored.into_iter().map(|v| v * scale).collect()
}

/// `Ψ_j(x)` for every integer `j`.
pub fn psi(j: i64, x: f64) -> LogScaledValue {
    if j >= 0 {
        let j = j as usize;
        let h = hermite_functions(x, j);
        psi_from_h(h[j], j, x)
    } else {
        let m = (-j - 1) as usize;
        psi_negative(x, m)[m]
    }
}

/// `Φ_j(x) = H_j(x) / 𝒩_j`.
///
/// # Panics
/// If `j < 0`; `Φ` only appears with non-negative index in the kernel sum.
pub fn phi(j: i64, x: f64) -> LogScaledValue {
    assert!(j >= 0, "Φ_j is defined only for j >= 0, got {j}");
    let j = j as usize;
    let h = hermite_functions(x, j);
    phi_from_h(h[j], j, x)
}

/// `Ψ_j(x)` for `j` in `lo..=hi`, indexed from `lo`.
pub fn psi_range(x: f64, lo: i64, hi: i64) -> Vec<LogScaledValue> {
    assert!(lo <= hi);
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    if lo < 0 {
        let m_max = (-lo - 1) as usize;
        let neg = psi_negative(x, m_max);
        let top = hi.min(-1);
        for j in lo..=top {
            out.push(neg[(-j - 1) as usize]);
        }
    }
    if hi >= 0 {
        let first = lo.max(0) as usize;
        let h = hermite_functions(x, hi as usize);
        for (j, hj) in h.into_iter().enumerate().skip(first) {
            out.push(psi_from_h(hj, j, x));
        }
    }
    out
}

/// `Φ_j(x)` for `j = 0..=n`.
pub fn phi_range(x: f64, n: usize) -> Vec<LogScaledValue> {
    hermite_functions(x, n)
        .into_iter()
        .enumerate()
        .map(|(j, h)| phi_from_h(h, j, x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::quadrature::gauss_legendre;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn psi_zero_at_origin_is_one() {
        assert_eq!(psi(0, 0.0).to_f64(), 1.0);
    }

    #[test]
    fn psi_three_closed_form() {
        // H_3(x) = 8x³ − 12x at x = 1.25: 15.625 − 15 = 0.625.
        let expected = (-1.5625f64).exp() * 0.625;
        assert!(rel(psi(3, 1.25).to_f64(), expected) < 1e-14);
    }

    #[test]
    fn psi_minus_one_at_origin() {
        let expected = PI.sqrt() / 2.0;
        assert!(rel(psi(-1, 0.0).to_f64(), expected) < 1e-15);
    }

    #[test]
    fn phi_low_orders() {
        let inv_sqrt_pi = 1.0 / PI.sqrt();
        assert!(rel(phi(0, 7.3).to_f64(), inv_sqrt_pi) < 1e-13);
        assert!(rel(phi(1, 1.0).to_f64(), inv_sqrt_pi) < 1e-15);
    }

    #[test]
    #[should_panic]
    fn phi_rejects_negative_index() {
        let _ = phi(-1, 0.0);
    }

    #[test]
    fn negative_index_satisfies_base_relation() {
        // 2Ψ_{-2} + 2xΨ_{-1} = Ψ_0 checks the Miller normalization.
        for &x in &[-3.0, -0.2, 0.0, 0.05, 0.4, 1.0, 3.5, 12.0, 40.0] {
            let seq = psi_negative(x, 40);
            let a = LogScaledValue::from_f64(2.0) * seq[1];
            let b = LogScaledValue::from_f64(2.0 * x) * seq[0];
            let rhs = LogScaledValue::from_log(-x * x);
            // Error measured against the larger summand: for x < 0 the
            // relation itself cancels. Building e^{-x²} from its log costs
            // about x² ulps.
            let scale = a.abs().add(b.abs());
            let err = (a.add(b).sub(rhs) / scale).to_f64().abs();
            assert!(err < 1e-14 + 1e-15 * x * x, "x={x}: {} vs {rhs}", a.add(b));
        }
    }

    /// Direct quadrature of `(1/m!) ∫_0^∞ s^m e^{-(x+s)²} ds`.
    fn iterated_tail_integral(m: usize, x: f64) -> f64 {
        let (nodes, weights) = gauss_legendre(64).unwrap();
        let ln_fact = libm::lgamma(m as f64 + 1.0);
        let peak = (0.5 * (x * x / 4.0 + 2.0 * m as f64).sqrt() - 0.5 * x).max(0.0);
        let upper = peak + 12.0;
        let panels = 60;
        let width = upper / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let a = p as f64 * width;
            for (t, w) in nodes.iter().zip(&weights) {
                let s = a + 0.5 * width * (t + 1.0);
                let lf = if s > 0.0 { m as f64 * s.ln() } else if m == 0 { 0.0 } else { f64::NEG_INFINITY };
                sum += 0.5 * width * w * (lf - (x + s) * (x + s) - ln_fact).exp();
            }
        }
        sum
    }

    #[test]
    fn negative_index_matches_defining_integral() {
        for &x in &[-2.0, 0.0, 0.01, 0.3, 1.7, 4.0] {
            let seq = psi_negative(x, 25);
            for m in [0usize, 1, 5, 12, 25] {
                let direct = iterated_tail_integral(m, x);
                assert!(
                    rel(seq[m].to_f64(), direct) < 1e-11,
                    "m={m} x={x}: {} vs {direct}",
                    seq[m].to_f64()
                );
            }
        }
    }

    #[test]
    fn no_overflow_in_extreme_range() {
        for &x in &[-1000.0, -37.0, 0.0, 250.0, 1000.0] {
            for j in [-300i64, -1, 0, 1, 5000, 10_000] {
                let p = psi(j, x);
                assert!(p.is_zero() || p.log_magnitude().is_finite(), "psi({j},{x})");
                if j >= 0 {
                    let f = phi(j, x);
                    assert!(f.is_zero() || f.log_magnitude().is_finite(), "phi({j},{x})");
                }
            }
        }
    }

    #[test]
    fn range_helpers_agree_with_pointwise() {
        let x = 0.7;
        let seq = psi_range(x, -6, 9);
        for (k, j) in (-6..=9).enumerate() {
            assert!(rel(seq[k].to_f64(), psi(j, x).to_f64()) < 1e-13, "j={j}");
        }
        let ph = phi_range(x, 9);
        for j in 0..=9 {
            assert!(rel(ph[j].to_f64(), phi(j as i64, x).to_f64()) < 1e-13);
        }
    }
}
