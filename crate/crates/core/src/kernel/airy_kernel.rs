//! The Airy kernel `K_Ai(x,y) = ∫₀^∞ Ai(x+w) Ai(y+w) dw`.

use crate::error::{Error, Result};
use crate::fredholm::quadrature::composite_grid;
use crate::special::airy_ai;

pub const AIRY_KERNEL_LOWER_LIMIT: f64 = -15.0;

/// The integrand is negligible once `min(x,y) + w` passes this point:
/// `Ai(14) < 1e-16`.
const CUTOFF: f64 = 14.0;
const NODES_PER_PANEL: usize = 20;

fn check(x: f64) -> Result<()> {
    if x >= AIRY_KERNEL_LOWER_LIMIT && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "airy kernel argument",
            value: x,
            domain: "[-15, inf)",
        })
    }
}

/// Quadrature rule in `w` on `[0, CUTOFF − lowest]`, unit panels.
fn w_rule(lowest: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let upper = (CUTOFF - lowest).max(1.0);
    let panels = upper.ceil() as usize;
    let g = composite_grid(0.0, upper, panels, NODES_PER_PANEL)?;
    Ok((g.nodes, g.weights))
}

/// `K_Ai(x, y)` by Gauss–Legendre quadrature of the Hankel-square form.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    check(x)?;
    check(y)?;
    let (w, omega) = w_rule(x.min(y))?;
    let mut sum = 0.0;
    for (wk, ok) in w.iter().zip(&omega) {
        sum += ok * airy_ai(x + wk)? * airy_ai(y + wk)?;
    }
    Ok(sum)
}

/// `K_Ai(x_i, x_j)` for all pairs of `nodes`, row-major, as `A Ω Aᵀ` with
/// `A_{ik} = Ai(x_i + w_k)`.
pub fn airy_kernel_matrix(nodes: &[f64]) -> Result<Vec<f64>> {
    for &x in nodes {
        check(x)?;
    }
    let lowest = nodes.iter().copied().fold(f64::INFINITY, f64::min);
    let (w, omega) = w_rule(lowest)?;
    let n = nodes.len();
    let mut a = Vec::with_capacity(n);
    for &x in nodes {
        let row: Result<Vec<f64>> = w
            .iter()
            .zip(&omega)
            .map(|(wk, ok)| airy_ai(x + wk).map(|v| v * ok.sqrt()))
            .collect();
        a.push(row?);
    }
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = a[i].iter().zip(&a[j]).map(|(p, q)| p * q).sum();
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::airy_ai_pair;

    /// `(Ai(x)Ai'(y) − Ai'(x)Ai(y)) / (x − y)`, or `Ai'(x)² − x Ai(x)²` on the diagonal.
    fn closed_form(x: f64, y: f64) -> f64 {
        let (a, ap) = airy_ai_pair(x).unwrap();
        if x == y {
            return ap * ap - x * a * a;
        }
        let (b, bp) = airy_ai_pair(y).unwrap();
        (a * bp - ap * b) / (x - y)
    }

    #[test]
    fn symmetric_as_computed() {
        assert_eq!(airy_kernel(1.3, -0.4).unwrap(), airy_kernel(-0.4, 1.3).unwrap());
    }

    #[test]
    fn positive_diagonal() {
        for x in [-2.0, 0.0, 2.0] {
            assert!(airy_kernel(x, x).unwrap() > 0.0);
        }
    }

    #[test]
    fn origin_matches_closed_form() {
        let want = crate::special::airy::AI_PRIME_ZERO.powi(2);
        assert!((airy_kernel(0.0, 0.0).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn matches_closed_form_across_range() {
        for &(x, y) in &[(-15.0, -15.0), (-14.2, -3.0), (-5.0, 2.5), (0.7, 0.2), (3.0, 8.0), (10.0, 10.0)] {
            let got = airy_kernel(x, y).unwrap();
            let want = closed_form(x, y);
            assert!((got - want).abs() < 1e-12, "({x},{y}): {got} vs {want}");
        }
    }

    #[test]
    fn batched_matches_pointwise() {
        let xs = [-3.0, -0.5, 0.0, 1.7, 6.0];
        let k = airy_kernel_matrix(&xs).unwrap();
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                let p = airy_kernel(xs[i], xs[j]).unwrap();
                assert!((k[i * xs.len() + j] - p).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_far_left() {
        assert!(airy_kernel(-15.5, 0.0).is_err());
    }
}
