use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Gauss–Legendre order served by [`gauss_legendre`].
pub const MAX_ORDER: usize = 2048;

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
///
/// Newton iteration on the three-term Legendre recurrence from the
/// Tricomi initial guesses; nodes and weights are accurate to a few ulps.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Config(format!(
            "Gauss-Legendre order {order} outside 1..={MAX_ORDER}"
        )));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp != 0.0 {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule mapped affinely onto `[lower, lower + length]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub lower: f64,
    pub length: f64,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn upper(&self) -> f64 {
        self.lower + self.length
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` with this rule.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the `order`-point Gauss–Legendre grid on `[t, t + length]`.
pub fn build_grid(t: f64, length: f64, order: usize) -> Result<QuadratureGrid> {
    if !(length > 0.0) || !t.is_finite() || !length.is_finite() {
        return Err(Error::Config(format!(
            "quadrature interval [{t}, {t} + {length}] is empty or not finite"
        )));
    }
    let (x, w) = gauss_legendre(order)?;
    let half = 0.5 * length;
    Ok(QuadratureGrid {
        lower: t,
        length,
        order,
        nodes: x.iter().map(|&s| t + half * (s + 1.0)).collect(),
        weights: w.iter().map(|&v| half * v).collect(),
    })
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` points each.
pub fn composite_grid(lower: f64, upper: f64, panels: usize, order: usize) -> Result<QuadratureGrid> {
    if panels == 0 || !(upper > lower) {
        return Err(Error::Config(format!(
            "composite rule on [{lower}, {upper}] with {panels} panels"
        )));
    }
    let (x, w) = gauss_legendre(order)?;
    let width = (upper - lower) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lower + p as f64 * width;
        for (s, v) in x.iter().zip(&w) {
            nodes.push(a + 0.5 * width * (s + 1.0));
            weights.push(0.5 * width * v);
        }
    }
    Ok(QuadratureGrid {
        lower,
        length: upper - lower,
        order: panels * order,
        nodes,
        weights,
    })
}
