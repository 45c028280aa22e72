//! Largest eigenvalue of a dense Hermitian matrix: Householder reduction to
//! a real symmetric tridiagonal, then Sturm-sequence bisection.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 300;

/// Diagonal and squared off-diagonal moduli of a tridiagonal matrix unitarily
/// similar to the row-major Hermitian `a`.
pub fn hermitian_tridiagonal(n: usize, a: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let zero = Complex64::new(0.0, 0.0);
    let mut off2 = Vec::with_capacity(n.saturating_sub(1));
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(1) {
        let s = k + 1;
        let norm2: f64 = (s..n).map(|i| m[i * n + k].norm_sqr()).sum();
        let x0 = m[s * n + k];
        let tail2 = norm2 - x0.norm_sqr();
        if tail2 <= f64::MIN_POSITIVE {
            off2.push(norm2);
            continue;
        }
        let norm = norm2.sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        // H x = α e₁ with α = −phase·‖x‖; v = x − α e₁.
        let alpha = -phase * norm;
        for i in s..n {
            v[i] = m[i * n + k];
        }
        v[s] -= alpha;
        let vnorm2: f64 = (s..n).map(|i| v[i].norm_sqr()).sum();
        let beta = 2.0 / vnorm2;
        // p = β A v on the trailing block.
        for i in s..n {
            let mut acc = zero;
            for j in s..n {
                acc += m[i * n + j] * v[j];
            }
            p[i] = acc * beta;
        }
        let vp: f64 = (s..n).map(|i| (v[i].conj() * p[i]).re).sum();
        let half = 0.5 * beta * vp;
        for i in s..n {
            p[i] -= v[i] * half;
        }
        // A ← A − v q* − q v*.
        for i in s..n {
            for j in s..n {
                m[i * n + j] -= v[i] * p[j].conj() + p[i] * v[j].conj();
            }
        }
        off2.push(alpha.norm_sqr());
    }
    let diag = (0..n).map(|i| m[i * n + i].re).collect();
    (diag, off2)
}

/// Number of eigenvalues of the tridiagonal `(d, e²)` strictly below `x`.
pub fn sturm_count(d: &[f64], e2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let coupling = if i == 0 { 0.0 } else { e2[i - 1] / q };
        q = d[i] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of the tridiagonal `(d, e²)` by bisection.
pub fn tridiagonal_largest(d: &[f64], e2: &[f64]) -> Result<f64> {
    let n = d.len();
    let e: Vec<f64> = e2.iter().map(|v| v.sqrt()).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { e[i - 1] } else { 0.0 } + e.get(i).copied().unwrap_or(0.0);
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonConvergence {
            context: "dense eigensolver: non-finite matrix".into(),
            coarse: lo,
            fine: hi,
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if sturm_count(d, e2, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NonConvergence {
        context: "dense eigensolver: bisection".into(),
        coarse: lo,
        fine: hi,
    })
}

/// Largest eigenvalue of the row-major Hermitian `a`.
pub fn largest_eigenvalue(n: usize, a: &[Complex64]) -> Result<f64> {
    let (d, e2) = hermitian_tridiagonal(n, a);
    tridiagonal_largest(&d, &e2)
}
