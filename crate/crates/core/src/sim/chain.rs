//! Spectral chain for the eigenvalues of successive minors.
//!
//! If the `N × N` corner has spectrum `λ` and the next row is `(b, a)`, the
//! `(N+1) × (N+1)` corner is unitarily similar to the arrowhead matrix with
//! diagonal `(λ, a)` and border `U*b`. For a Gaussian row, `U*b` has the law
//! of `b` whatever `U` is, so the new spectrum is the set of roots of
//!
//! `g(μ) = μ − a − Σ_k c_k / (μ − λ_k)`, `c_k = |b_k|²`,
//!
//! one in each gap of `λ` and one beyond either end. The chain has the law of
//! the minor spectra at O(N²) cost per step.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100;
const MAX_MODEL_ITERATIONS: usize = 200;

/// Smallest border weight; keeps every `λ_k` a genuine pole.
const MIN_WEIGHT: f64 = 1e-300;

/// `(Σ c_k/(μ − λ_k), Σ c_k/(μ − λ_k)²)` over a slice of poles.
fn pole_sums(lam: &[f64], c: &[f64], mu: f64) -> (f64, f64) {
    let mut s1 = [0.0; 4];
    let mut s2 = [0.0; 4];
    let lc = lam.chunks_exact(4);
    let cc = c.chunks_exact(4);
    let (lr, cr) = (lc.remainder(), cc.remainder());
    for (l4, c4) in lc.zip(cc) {
        for i in 0..4 {
            let r = 1.0 / (mu - l4[i]);
            let t = c4[i] * r;
            s1[i] += t;
            s2[i] += t * r;
        }
    }
    let (mut a, mut b) = ((s1[0] + s1[1]) + (s1[2] + s1[3]), (s2[0] + s2[1]) + (s2[2] + s2[3]));
    for (&l, &w) in lr.iter().zip(cr) {
        let r = 1.0 / (mu - l);
        a += w * r;
        b += w * r * r;
    }
    (a, b)
}

/// The bracketed slot: exact poles at offsets `0` (left) and `gap` (right)
/// from `origin`, either of which may be absent for the outer slots.
struct Slot<'a> {
    lam: &'a [f64],
    c: &'a [f64],
    a: f64,
    origin: f64,
    /// Indices of the poles treated exactly.
    near: [Option<usize>; 2],
}

impl Slot<'_> {
    /// `(F, F')` at `τ` for `F = g + Σ_{near} c_k/(μ − λ_k)`.
    fn smooth_part(&self, tau: f64) -> (f64, f64) {
        let mu = self.origin + tau;
        let lo = self.near[0].or(self.near[1]).unwrap_or(0);
        let hi = self.near[1].or(self.near[0]).map_or(0, |k| k + 1);
        let (a1, a2) = pole_sums(&self.lam[..lo], &self.c[..lo], mu);
        let (b1, b2) = pole_sums(&self.lam[hi..], &self.c[hi..], mu);
        (mu - self.a - a1 - b1, 1.0 + a2 + b2)
    }

    /// `Σ_{near} c/(τ − δ)`.
    fn near_terms(&self, tau: f64) -> f64 {
        self.near
            .iter()
            .flatten()
            .map(|&k| self.c[k] / (tau - (self.lam[k] - self.origin)))
            .sum()
    }

    /// Root in `(lo, hi)` of `F(τ₀) + F'(τ₀)(τ − τ₀) − Σ_{near} c/(τ − δ)`,
    /// found as a root of that model times `Π_{near}(τ − δ)`, a polynomial of
    /// degree two or three, by safeguarded Newton.
    fn model_root(&self, tau0: f64, f: f64, df: f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut poles = [(0.0, 0.0); 2];
        let mut count = 0;
        for k in self.near.iter().flatten() {
            poles[count] = (self.lam[*k] - self.origin, self.c[*k]);
            count += 1;
        }
        let poly = |t: f64| {
            let lin = f + df * (t - tau0);
            if count == 1 {
                let (d, c) = poles[0];
                (lin * (t - d) - c, df * (t - d) + lin)
            } else {
                let ((d1, c1), (d2, c2)) = (poles[0], poles[1]);
                let (e1, e2) = (t - d1, t - d2);
                (
                    lin * e1 * e2 - c1 * e2 - c2 * e1,
                    df * e1 * e2 + lin * (e1 + e2) - c1 - c2,
                )
            }
        };
        // Sign of Π(τ − δ) on the slot; orients the polynomial like the model.
        let mid = 0.5 * (lo + hi);
        let orient: f64 = poles[..count].iter().map(|&(d, _)| (mid - d).signum()).product();
        let mut t = if tau0 > lo && tau0 < hi { tau0 } else { mid };
        for _ in 0..MAX_MODEL_ITERATIONS {
            let (h, dh) = poly(t);
            let m = h * orient;
            if m == 0.0 {
                return t;
            }
            if m > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - h / dh;
            if !(next >= lo && next <= hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= f64::EPSILON * next.abs() || next == t {
                return next;
            }
            t = next;
        }
        t
    }
}

/// Root of the secular equation in slot `j` (`0..=lam.len()`), ascending.
fn root(lam: &[f64], c: &[f64], a: f64, spread: f64, j: usize) -> Result<f64> {
    let n = lam.len();
    let (slot, lo0, hi0) = if j == n {
        let o = n - 1;
        let s = Slot { lam, c, a, origin: lam[o], near: [Some(o), None] };
        (s, 0.0, (a - lam[o]).max(0.0) + spread)
    } else if j == 0 {
        let s = Slot { lam, c, a, origin: lam[0], near: [None, Some(0)] };
        (s, (a - lam[0]).min(0.0) - spread, 0.0)
    } else {
        let gap = lam[j] - lam[j - 1];
        if gap <= 0.0 {
            return Ok(lam[j]);
        }
        let s = Slot { lam, c, a, origin: lam[j - 1], near: [Some(j - 1), Some(j)] };
        (s, 0.0, gap)
    };
    let (mut lo, mut hi) = (lo0, hi0);
    let mut tau = match (j == 0, j == n) {
        (true, _) => lo,
        (_, true) => hi,
        _ => 0.5 * hi,
    };
    for _ in 0..MAX_ITERATIONS {
        let (f, df) = slot.smooth_part(tau);
        let g = f - slot.near_terms(tau);
        if g == 0.0 {
            return Ok(slot.origin + tau);
        }
        if g > 0.0 {
            hi = hi.min(tau);
        } else {
            lo = lo.max(tau);
        }
        let mut next = slot.model_root(tau, f, df, lo0, hi0);
        // A root closer to a pole than one ulp rounds onto it.
        if (next == lo0 && j > 0) || (next == hi0 && j < n) {
            return Ok(slot.origin + next);
        }
        if !(next >= lo && next <= hi && next != lo0 && next != hi0) {
            next = 0.5 * (lo + hi);
        }
        let scale = next.abs().max(slot.origin.abs());
        let step = (next - tau).abs();
        if step <= 4.0 * f64::EPSILON * scale || hi - lo <= 4.0 * f64::EPSILON * scale {
            return Ok(slot.origin + next);
        }
        tau = next;
    }
    if hi - lo <= 1e3 * f64::EPSILON * hi.abs().max(lo.abs()).max(slot.origin.abs()) {
        return Ok(slot.origin + 0.5 * (lo + hi));
    }
    Err(Error::NonConvergence {
        context: format!("secular equation, slot {j} of {}", n + 1),
        coarse: slot.origin + lo,
        fine: slot.origin + hi,
    })
}

/// Spectrum of the bordered matrix: all roots of the secular equation for the
/// ascending `lam`, border weights `c` and corner `a`, ascending.
pub fn bordered_spectrum(lam: &[f64], c: &[f64], a: f64) -> Result<Vec<f64>> {
    assert_eq!(lam.len(), c.len());
    if lam.is_empty() {
        return Ok(vec![a]);
    }
    let c: Vec<f64> = c.iter().map(|&w| w.max(MIN_WEIGHT)).collect();
    let spread = c.iter().sum::<f64>().sqrt();
    let mut out = (0..=lam.len())
        .map(|j| root(lam, &c, a, spread, j))
        .collect::<Result<Vec<_>>>()?;
    // Interlacing holds exactly; rounding of `origin + τ` may not respect it.
    for k in 0..lam.len() {
        out[k] = out[k].min(lam[k]);
        out[k + 1] = out[k + 1].max(lam[k]);
    }
    Ok(out)
}
