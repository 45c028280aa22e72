//! The GUE minor-process kernel
//! `K(u₁,y₁;u₂,y₂) = −φ^{(u₁,u₂)}(y₁,y₂) + Σ_{l=1}^{u₂} Ψ_{u₁−l}(y₁) Φ_{u₂−l}(y₂)`.
//!
//! Internally every evaluation goes through the *balanced* conjugate
//! `K_b = g(u₁,y₁) K g(u₂,y₂)^{-1}` with `g(u,y) = e^{y²/2} / √(2^u u!)`,
//! which turns the sum into one over orthonormal Hermite functions `h_j`
//! with weights bounded by one. Conjugation leaves every Fredholm
//! determinant unchanged, and `K_b` is of order one near the spectral edge,
//! so determinant assembly works with it directly.
//!
//! For `u₁ < u₂` the finite sum can cancel catastrophically when the lines
//! are far apart. The same kernel also equals the convergent tail
//! `−Σ_{j≥u₁} Ψ_j(y₁) Φ_{j+u₂−u₁}(y₂)`, whose balanced weights decrease
//! geometrically; it is used whenever the finite form loses accuracy.

use std::f64::consts::{LN_2, PI};

use crate::par::Parallelism;
use crate::special::hermite::psi_negative;
use crate::special::{hermite_functions, LogScaledValue};

use super::coords::unscale_y;

/// Largest tolerated ratio of the absolute term sum to `max(|K_b|, 1e-3)`
/// before the finite form is replaced by the tail form.
const CANCELLATION_LIMIT: f64 = 1e3;
/// Tail weights below this are dropped; `|h_j| < 1` bounds the remainder.
const TAIL_LOG_CUTOFF: f64 = -43.0;
/// Longest tail the evaluator is willing to sum.
const TAIL_MAX_TERMS: usize = 200_000;

/// `ln(b!/a!)` for `a <= b`, summed exactly for short ranges.
fn ln_factorial_ratio(a: u64, b: u64) -> f64 {
    debug_assert!(a <= b);
    if b - a <= 4096 {
        ((a + 1)..=b).map(|i| (i as f64).ln()).sum()
    } else {
        libm::lgamma(b as f64 + 1.0) - libm::lgamma(a as f64 + 1.0)
    }
}

/// `ln(u!)` for the line index `u`.
fn ln_factorial(u: u64) -> f64 {
    ln_factorial_ratio(0, u)
}

/// `ln g(u,y) = y²/2 − ½(u ln 2 + ln u!)`, the balancing conjugation.
fn ln_balance(u: u32, y: f64) -> f64 {
    0.5 * y * y - 0.5 * (f64::from(u) * LN_2 + ln_factorial(u64::from(u)))
}

/// `ln g(u₁,y₁) − ln g(u₂,y₂)` with the factorials combined before rounding.
fn ln_balance_ratio(u1: u32, y1: f64, u2: u32, y2: f64) -> f64 {
    let (a, b) = (u64::from(u1), u64::from(u2));
    let factorials = if a <= b {
        ln_factorial_ratio(a, b)
    } else {
        -ln_factorial_ratio(b, a)
    };
    0.5 * (y1 * y1 - y2 * y2) + 0.5 * ((f64::from(u2) - f64::from(u1)) * LN_2 + factorials)
}

/// A vector of reals sharing one binary exponent: `values[k] · 2^exponent`.
#[derive(Debug, Clone)]
pub(crate) struct ScaledVector {
    pub exponent: i64,
    pub values: Vec<f64>,
}

impl ScaledVector {
    pub fn from_log_scaled(v: &[LogScaledValue]) -> Self {
        let exponent = v
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| x.to_parts().1)
            .max()
            .unwrap_or(0);
        let values = v
            .iter()
            .map(|x| {
                let (m, e) = x.to_parts();
                let shift = (e - exponent).max(-1200) as i32;
                libm::ldexp(m, shift)
            })
            .collect();
        Self { exponent, values }
    }
}

/// How a kernel between two lines is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Form {
    /// `u₁ >= u₂`: finite sum, no transition term.
    Direct,
    /// `u₁ < u₂`: finite sum minus the transition kernel.
    Finite,
    /// `u₁ < u₂`: convergent tail sum up to index `last`.
    Tail { last: usize },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Plan {
    pub u1: u32,
    pub u2: u32,
    pub form: Form,
}

impl Plan {
    /// Direct or finite form, whichever applies to the ordering.
    pub fn finite(u1: u32, u2: u32) -> Self {
        let form = if u1 >= u2 { Form::Direct } else { Form::Finite };
        Self { u1, u2, form }
    }

    /// Tail form, or `None` if the tail is too long to sum.
    pub fn tail(u1: u32, u2: u32) -> Option<Self> {
        assert!(u1 < u2);
        let d = f64::from(u2 - u1);
        let mut ln_w = 0.0;
        let mut j = u1 as usize;
        while ln_w > TAIL_LOG_CUTOFF {
            let jf = j as f64 + 1.0;
            ln_w += 0.5 * (jf / (jf + d)).ln();
            j += 1;
            if j - u1 as usize > TAIL_MAX_TERMS {
                return None;
            }
        }
        Some(Self {
            u1,
            u2,
            form: Form::Tail { last: j },
        })
    }

    /// Balanced left factors at `x` on line `u1`.
    pub fn left(&self, x: f64) -> ScaledVector {
        let (u1, u2) = (self.u1 as usize, self.u2 as usize);
        let v: Vec<LogScaledValue> = match self.form {
            Form::Direct => {
                let dd = u1 - u2;
                let h = hermite_functions(x, u1.saturating_sub(1));
                // w_k² = (k+dd)! u₂! / (u₁! k!), stepped down from w_{u₂-1}² = u₂/u₁.
                let mut out = vec![LogScaledValue::ZERO; u2];
                let mut ln_w2 = (u2 as f64 / u1 as f64).ln();
                for k in (0..u2).rev() {
                    out[k] = h[k + dd].scale_log(0.5 * ln_w2);
                    if k > 0 {
                        ln_w2 += (k as f64 / (k + dd) as f64).ln();
                    }
                }
                out
            }
            Form::Finite => {
                let d = u2 - u1;
                let mut out = vec![LogScaledValue::ZERO; u2];
                if u1 > 0 {
                    // k >= d: j = k − d, w² = j! u₂! / (u₁! k!), starting at
                    // w_d² = C(u₂, d).
                    let h = hermite_functions(x, u1 - 1);
                    let mut ln_w2: f64 = (1..=d).map(|i| ((u1 + i) as f64 / i as f64).ln()).sum();
                    for k in d..u2 {
                        let j = k - d;
                        out[k] = h[j].scale_log(0.5 * ln_w2);
                        ln_w2 += ((j + 1) as f64 / (k + 1) as f64).ln();
                    }
                }
                // k < d: Ψ_{−1−m}(x), m = d − 1 − k, times e^{x²/2} c_{u₁} √(2^{u₂} u₂! / 𝒩_k).
                let neg = psi_negative(x, d - 1);
                let ln_top = ln_factorial_ratio(u1 as u64, u2 as u64);
                for k in 0..d {
                    let m = d - 1 - k;
                    let ln_s = 0.5 * x * x
                        + 0.5
                            * ((d - k) as f64 * LN_2 + ln_top
                                - ln_factorial(k as u64)
                                - 0.5 * PI.ln());
                    out[k] = neg[m].scale_log(ln_s);
                }
                out
            }
            Form::Tail { last } => {
                let d = u2 - u1;
                let h = hermite_functions(x, last);
                let mut out = Vec::with_capacity(last + 1 - u1);
                let mut ln_w2 = 0.0;
                for j in u1..=last {
                    out.push(-h[j].scale_log(0.5 * ln_w2));
                    ln_w2 += ((j + 1) as f64 / (j + 1 + d) as f64).ln();
                }
                out
            }
        };
        ScaledVector::from_log_scaled(&v)
    }

    /// Balanced right factors at `y` on line `u2`.
    pub fn right(&self, y: f64) -> ScaledVector {
        let h = match self.form {
            Form::Direct | Form::Finite => {
                let mut h = hermite_functions(y, self.u2 as usize);
                h.truncate(self.u2 as usize);
                h
            }
            Form::Tail { last } => {
                let d = (self.u2 - self.u1) as usize;
                let h = hermite_functions(y, last + d);
                h[(self.u1 as usize + d)..].to_vec()
            }
        };
        ScaledVector::from_log_scaled(&h)
    }

    /// Balanced transition term subtracted in the finite form.
    pub fn transition(&self, x: f64, y: f64) -> LogScaledValue {
        if self.form != Form::Finite {
            return LogScaledValue::ZERO;
        }
        let phi = phi_transition(self.u1, x, self.u2, y);
        if phi.is_zero() {
            return phi;
        }
        phi.scale_log(ln_balance_ratio(self.u1, x, self.u2, y))
    }
}

/// `K_b` and the absolute sum of its terms.
pub(crate) fn combine(
    left: &ScaledVector,
    right: &ScaledVector,
    transition: LogScaledValue,
) -> (LogScaledValue, LogScaledValue) {
    let mut dot = 0.0;
    let mut abs = 0.0;
    for (a, b) in left.values.iter().zip(&right.values) {
        let t = a * b;
        dot += t;
        abs += t.abs();
    }
    let e = left.exponent + right.exponent;
    let value = LogScaledValue::from_parts(dot, e).sub(transition);
    let magnitude = LogScaledValue::from_parts(abs, e).add(transition.abs());
    (value, magnitude)
}

fn cancels(value: LogScaledValue, magnitude: LogScaledValue) -> bool {
    let floor = LogScaledValue::from_f64(1e-3);
    let reference = if value.cmp_magnitude(floor).is_lt() {
        floor
    } else {
        value.abs()
    };
    (magnitude / reference).to_f64() > CANCELLATION_LIMIT
}

/// Balanced kernel at a single pair of points.
pub(crate) fn balanced_entry(u1: u32, x: f64, u2: u32, y: f64) -> LogScaledValue {
    let plan = Plan::finite(u1, u2);
    let (value, magnitude) = combine(&plan.left(x), &plan.right(y), plan.transition(x, y));
    if plan.form == Form::Finite && cancels(value, magnitude) {
        if let Some(tail) = Plan::tail(u1, u2) {
            return combine(&tail.left(x), &tail.right(y), LogScaledValue::ZERO).0;
        }
    }
    value
}

/// Balanced kernel on a product grid `xs × ys`, row-major and decoded.
///
/// The summation form is chosen once per block so that every entry of a
/// block shares one representation.
pub(crate) fn balanced_block(u1: u32, xs: &[f64], u2: u32, ys: &[f64], par: Parallelism) -> Vec<f64> {
    let evaluate = |plan: Plan| -> (Vec<f64>, bool) {
        let lefts = par.map(xs, |&x| plan.left(x));
        let rights = par.map(ys, |&y| plan.right(y));
        let rows = par.map_range(xs.len(), |i| {
            let mut row = Vec::with_capacity(ys.len());
            let mut bad = false;
            for (j, r) in rights.iter().enumerate() {
                let (v, m) = combine(&lefts[i], r, plan.transition(xs[i], ys[j]));
                bad |= plan.form == Form::Finite && cancels(v, m);
                row.push(v.to_f64());
            }
            (row, bad)
        });
        let bad = rows.iter().any(|r| r.1);
        (rows.into_iter().flat_map(|r| r.0).collect(), bad)
    };
    let (values, bad) = evaluate(Plan::finite(u1, u2));
    if bad {
        if let Some(tail) = Plan::tail(u1, u2) {
            return evaluate(tail).0;
        }
    }
    values
}

/// `φ^{(u₁,u₂)}(y₁,y₂)`: zero unless `u₁ < u₂` and `y₂ > y₁`, else
/// `(y₂−y₁)^{u₂−u₁−1} / (u₂−u₁−1)!`.
pub fn phi_transition(u1: u32, y1: f64, u2: u32, y2: f64) -> LogScaledValue {
    if u1 >= u2 || y2 <= y1 {
        return LogScaledValue::ZERO;
    }
    let p = u64::from(u2 - u1 - 1);
    LogScaledValue::from_log(p as f64 * (y2 - y1).ln() - ln_factorial(p))
}

/// `K(u₁,y₁;u₂,y₂)` in unscaled coordinates.
pub fn kernel_raw(u1: u32, y1: f64, u2: u32, y2: f64) -> LogScaledValue {
    assert!(u1 >= 1 && u2 >= 1, "line indices must be positive");
    balanced_entry(u1, y1, u2, y2).scale_log(-ln_balance_ratio(u1, y1, u2, y2))
}

/// The bare sum `Σ_{l=1}^{u₂} Ψ_{u₁−l}(y₁) Φ_{u₂−l}(y₂)` from the
/// unnormalized functions, without the transition term.
pub fn kernel_hermite_sum(u1: u32, y1: f64, u2: u32, y2: f64) -> LogScaledValue {
    let lo = i64::from(u1) - i64::from(u2);
    let psi = crate::special::psi_range(y1, lo, i64::from(u1) - 1);
    let phi = crate::special::phi_range(y2, u2 as usize - 1);
    // psi[k] = Ψ_{lo+k} pairs with Φ_{k}.
    let terms: Vec<LogScaledValue> = psi.iter().zip(&phi).map(|(&a, &b)| a * b).collect();
    let v = ScaledVector::from_log_scaled(&terms);
    LogScaledValue::from_parts(v.values.iter().sum(), v.exponent)
}

/// `ln J(u,y) = u ln 2 + (u/2)(ln(u/2) + 1) − √(2u) y`.
fn ln_scale_factor(u: u32, y: f64) -> f64 {
    let uf = f64::from(u);
    uf * LN_2 + 0.5 * uf * ((0.5 * uf).ln() + 1.0) - (2.0 * uf).sqrt() * y
}

/// `J(u,y) = 2^u exp((u/2)(log(u/2) + 1) − √(2u) y)`.
pub fn scale_factor_j(u: u32, y: f64) -> LogScaledValue {
    assert!(u >= 1, "line index must be positive");
    LogScaledValue::from_log(ln_scale_factor(u, y))
}

/// `ln(J(u₂,y₂)/J(u₁,y₁)) − ln(g(u₁,y₁)/g(u₂,y₂))`: converts `K_b` to `K̃`.
pub(crate) fn ln_balanced_to_scaled(u1: u32, y1: f64, u2: u32, y2: f64) -> f64 {
    ln_scale_factor(u2, y2) - ln_scale_factor(u1, y1) - ln_balance_ratio(u1, y1, u2, y2)
}

/// `K̃ = J(u₂,y₂)/J(u₁,y₁) · K`, arguments and result in scaled coordinates.
pub fn kernel_scaled(u1: u32, y_tilde1: f64, u2: u32, y_tilde2: f64) -> f64 {
    let y1 = unscale_y(u1, y_tilde1);
    let y2 = unscale_y(u2, y_tilde2);
    balanced_entry(u1, y1, u2, y2)
        .scale_log(ln_balanced_to_scaled(u1, y1, u2, y2))
        .to_f64()
}

/// `K̃ᴰ = 1[u₁ ≤ u₂] K̃`, the kernel of independent lines.
pub fn kernel_decorrelated(u1: u32, y_tilde1: f64, u2: u32, y_tilde2: f64) -> f64 {
    if u1 <= u2 {
        kernel_scaled(u1, y_tilde1, u2, y_tilde2)
    } else {
        0.0
    }
}

/// `ln g` exposed for the determinant-equivalence tests.
#[doc(hidden)]
pub fn ln_balance_factor(u: u32, y: f64) -> f64 {
    ln_balance(u, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn transition_values() {
        assert!(phi_transition(5, 0.1, 3, 0.7).is_zero());
        assert!((phi_transition(3, 0.0, 4, 2.0).to_f64() - 1.0).abs() < 1e-15);
        assert!((phi_transition(2, 0.0, 5, 3.0).to_f64() - 4.5).abs() < 1e-14);
        assert!(phi_transition(2, 1.0, 5, 0.5).is_zero());
    }

    #[test]
    fn first_line_is_gaussian() {
        for &(y1, y2) in &[(0.0, 0.0), (0.4, -2.0), (-1.3, 5.0)] {
            let k = kernel_raw(1, y1, 1, y2).to_f64();
            let want = (-y1 * y1).exp() / PI.sqrt();
            assert!(rel(k, want) < 1e-14, "{k} vs {want}");
        }
    }

    #[test]
    fn scale_factor_reference() {
        assert!(rel(scale_factor_j(2, 0.0).to_f64(), 4.0 * std::f64::consts::E) < 1e-15);
        let slope = scale_factor_j(2, 1.0).log_magnitude() - scale_factor_j(2, 0.0).log_magnitude();
        assert!((slope + 2.0).abs() < 1e-14);
        assert!(scale_factor_j(100, 14.2).log_magnitude().is_finite());
    }

    #[test]
    fn scaled_kernel_at_first_line() {
        let yt = super::super::coords::scale_y(1, 0.0);
        let k = kernel_scaled(1, yt, 1, yt);
        assert!(rel(k, 1.0 / PI.sqrt()) < 1e-14);
    }

    #[test]
    fn decorrelated_kernel_indicator() {
        assert_eq!(kernel_decorrelated(7, 0.3, 3, -1.0), 0.0);
        assert_eq!(kernel_decorrelated(3, 0.3, 7, -1.0), kernel_scaled(3, 0.3, 7, -1.0));
    }

    #[test]
    fn balanced_matches_bare_sum_when_lines_are_close() {
        for &(u1, y1, u2, y2) in &[(8, 0.3, 5, -0.2), (3, 0.5, 6, 1.1), (4, 1.0, 4, 2.0), (2, -0.3, 9, 0.7)] {
            let bare = kernel_hermite_sum(u1, y1, u2, y2);
            let full = kernel_raw(u1, y1, u2, y2).add(phi_transition(u1, y1, u2, y2));
            let scale = bare.abs().add(phi_transition(u1, y1, u2, y2)).to_f64();
            assert!(
                (full.to_f64() - bare.to_f64()).abs() <= 1e-12 * scale,
                "({u1},{y1};{u2},{y2}): {full} vs {bare}"
            );
        }
    }

    #[test]
    fn tail_and_finite_forms_agree() {
        // Separations large enough for a short tail and small enough that
        // the finite sum does not cancel much.
        for &(u1, u2, x, y) in &[(10u32, 60u32, 4.1, 10.6), (30, 120, 7.5, 15.0), (6, 60, 3.0, 10.2)] {
            let finite = Plan::finite(u1, u2);
            let (a, _) = combine(&finite.left(x), &finite.right(y), finite.transition(x, y));
            let tail = Plan::tail(u1, u2).unwrap();
            let (b, _) = combine(&tail.left(x), &tail.right(y), LogScaledValue::ZERO);
            let (_, magnitude) = combine(&finite.left(x), &finite.right(y), finite.transition(x, y));
            let tol = 1e-13 * magnitude.to_f64().max(1.0);
            assert!((a.to_f64() - b.to_f64()).abs() < tol, "{u1},{u2}: {a} vs {b} (sum {magnitude})");
        }
    }

    #[test]
    fn far_separated_lines_stay_finite() {
        // 60 against 2000 near both edges: the finite sum cancels by ~e^{80}.
        let x = (120.0f64).sqrt();
        let y = (4000.0f64).sqrt();
        let k = balanced_entry(60, x, 2000, y).to_f64();
        assert!(k.is_finite() && k.abs() < 1.0, "{k}");
    }
}
