//! Least-squares fits of log-tails against powers of the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{tracy_widom_cdf_relative, tracy_widom_survival, GridParams};

/// Fewest points accepted by a tail fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares coefficients of `y ≈ Σ_j β_j columns[j]`.
///
/// Solved through the normal equations after scaling each column to unit
/// norm, which is adequate for the two- and three-column fits used here.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let p = columns.len();
    let n = y.len();
    if p == 0 || n < p || columns.iter().any(|c| c.len() != n) {
        return Err(Error::Precondition(format!(
            "least squares with {p} columns and {n} observations"
        )));
    }
    let norms: Vec<f64> = columns.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    if norms.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Precondition("least squares with a zero column".into()));
    }
    // Augmented system [AᵀA | Aᵀy] in scaled coordinates.
    let mut m = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            m[i][j] = (0..n).map(|k| columns[i][k] * columns[j][k]).sum::<f64>() / (norms[i] * norms[j]);
        }
        m[i][p] = (0..n).map(|k| columns[i][k] * y[k]).sum::<f64>() / norms[i];
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        m.swap(col, pivot);
        let d = m[col][col];
        if d.abs() < 1e-13 {
            return Err(Error::Precondition("least squares columns are collinear".into()));
        }
        for r in 0..p {
            if r != col {
                let f = m[r][col] / d;
                for k in col..=p {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    Ok((0..p).map(|i| m[i][p] / m[i][i] / norms[i]).collect())
}

/// `log P ≈ slope·s^power + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub power: f64,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

impl PowerFit {
    pub fn predict(&self, s: f64) -> f64 {
        self.slope * s.powf(self.power) + self.intercept
    }
}

/// Fits `log_tail` against `s^power` with an intercept.
pub fn fit_power(s: &[f64], log_tail: &[f64], power: f64) -> Result<PowerFit> {
    check_points(s, log_tail)?;
    let x: Vec<f64> = s.iter().map(|v| v.powf(power)).collect();
    let beta = least_squares(&[x, vec![1.0; s.len()]], log_tail)?;
    let mut fit = PowerFit {
        power,
        slope: beta[0],
        intercept: beta[1],
        max_residual: 0.0,
    };
    fit.max_residual = max_residual(s, log_tail, |v| fit.predict(v));
    Ok(fit)
}

/// `log P ≈ slope·s^power + log_coefficient·log s + intercept`: the power
/// law with the leading algebraic prefactor absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjustedFit {
    pub power: f64,
    pub slope: f64,
    pub log_coefficient: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn fit_power_with_log(s: &[f64], log_tail: &[f64], power: f64) -> Result<AdjustedFit> {
    check_points(s, log_tail)?;
    if s.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Precondition("log covariate needs positive abscissae".into()));
    }
    let x: Vec<f64> = s.iter().map(|v| v.powf(power)).collect();
    let l: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let beta = least_squares(&[x, l, vec![1.0; s.len()]], log_tail)?;
    let predict = |v: f64| beta[0] * v.powf(power) + beta[1] * v.ln() + beta[2];
    Ok(AdjustedFit {
        power,
        slope: beta[0],
        log_coefficient: beta[1],
        intercept: beta[2],
        max_residual: max_residual(s, log_tail, predict),
    })
}

fn check_points(s: &[f64], log_tail: &[f64]) -> Result<()> {
    if s.len() != log_tail.len() {
        return Err(Error::Precondition("abscissae and values differ in length".into()));
    }
    if s.len() < MIN_FIT_POINTS {
        return Err(Error::Precondition(format!(
            "tail fit needs at least {MIN_FIT_POINTS} points, got {}",
            s.len()
        )));
    }
    if log_tail.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("log-tail values must be finite".into()));
    }
    Ok(())
}

fn max_residual(s: &[f64], y: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    s.iter().zip(y).map(|(&v, &w)| (w - f(v)).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSide {
    /// `log(1 − F_TW(s))` against `s^{3/2}`.
    Right,
    /// `log F_TW(−s)` against `s³`.
    Left,
}

impl TailSide {
    pub fn power(self) -> f64 {
        match self {
            TailSide::Right => 1.5,
            TailSide::Left => 3.0,
        }
    }

    /// The limiting coefficient of `s^power`.
    pub fn target(self) -> f64 {
        match self {
            TailSide::Right => -4.0 / 3.0,
            TailSide::Left => -1.0 / 12.0,
        }
    }

    /// Power of `s` in the leading algebraic prefactor of the tail.
    pub fn prefactor_exponent(self) -> f64 {
        match self {
            TailSide::Right => -1.5,
            TailSide::Left => -0.125,
        }
    }
}

/// Tracy–Widom log-tail data and both fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub side: TailSide,
    pub s: Vec<f64>,
    pub log_tail: Vec<f64>,
    pub fit: PowerFit,
    pub adjusted: AdjustedFit,
}

impl TailFit {
    /// `|slope/target − 1|` of the plain power fit.
    pub fn relative_error(&self) -> f64 {
        (self.fit.slope / self.side.target() - 1.0).abs()
    }
}

/// Fits the Tracy–Widom tail on the side's axis at the given `s ≥ 0` points.
pub fn tail_exponent_fit(side: TailSide, s: &[f64], params: &GridParams) -> Result<TailFit> {
    if s.len() < MIN_FIT_POINTS {
        return Err(Error::Precondition(format!(
            "tail fit needs at least {MIN_FIT_POINTS} points, got {}",
            s.len()
        )));
    }
    if s.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Precondition("tail fit points must be positive".into()));
    }
    let log_tail = params
        .parallelism
        .map(s, |&v| {
            let p = match side {
                TailSide::Right => tracy_widom_survival(v, params)?,
                TailSide::Left => tracy_widom_cdf_relative(-v, params)?,
            };
            if p > 0.0 {
                Ok(p.ln())
            } else {
                Err(Error::NonConvergence {
                    context: format!("Tracy-Widom tail at s = {v} underflowed"),
                    coarse: p,
                    fine: p,
                })
            }
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    Ok(TailFit {
        side,
        s: s.to_vec(),
        fit: fit_power(s, &log_tail, side.power())?,
        adjusted: fit_power_with_log(s, &log_tail, side.power())?,
        log_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_log_linear_data() {
        let s: Vec<f64> = (1..=8).map(f64::from).collect();
        let y: Vec<f64> = s.iter().map(|v| -2.0 * v + 0.5).collect();
        let f = fit_power(&s, &y, 1.0).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12 && (f.intercept - 0.5).abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
    }

    #[test]
    fn log_covariate_recovers_prefactor() {
        let s: Vec<f64> = (0..12).map(|k| 2.0 + 0.5 * f64::from(k)).collect();
        let y: Vec<f64> = s.iter().map(|v| -4.0 / 3.0 * v.powf(1.5) - 1.5 * v.ln() - 3.9).collect();
        let f = fit_power_with_log(&s, &y, 1.5).unwrap();
        assert!((f.slope + 4.0 / 3.0).abs() < 1e-9);
        assert!((f.log_coefficient + 1.5).abs() < 1e-8);
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(fit_power(&[1.0, 2.0, 3.0], &[0.0, 1.0, 2.0], 1.0).is_err());
        let p = GridParams::with_order(8).without_refinement();
        assert!(tail_exponent_fit(TailSide::Right, &[3.0, 4.0, 5.0], &p).is_err());
    }

    #[test]
    fn collinear_columns_rejected() {
        assert!(least_squares(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]], &[1.0, 2.0, 3.0]).is_err());
    }
}
