//! Deterministic sweeps over the determinant routines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{
    correlation_f, decorrelation_e, single_line_cdf, single_line_survival, trace_bounds, GridParams, TraceBounds,
};
use crate::special::normal_sf;

use super::fit::{fit_power, PowerFit};

/// Finite-`u` tails on a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailScan {
    pub u: u32,
    pub t: Vec<f64>,
    /// `Pr[λ^(u) > t]`.
    pub p_right: Vec<f64>,
    /// `Pr[λ^(u) ≤ −t]`.
    pub p_left: Vec<f64>,
    /// Trace sandwich at every `t ≥ 0`; `None` below zero.
    pub trace: Vec<Option<TraceBounds>>,
    /// `log P_right` against `t^{3/2}` over the right fit window.
    pub right_fit: Option<PowerFit>,
    /// `log P_left` against `t³` over the left fit window.
    pub left_fit: Option<PowerFit>,
}

impl TailScan {
    /// Largest violation of `1 − e^{−tr} ≤ P_right ≤ tr` on the grid.
    pub fn sandwich_violation(&self) -> f64 {
        self.trace
            .iter()
            .zip(&self.p_right)
            .filter_map(|(b, &p)| b.map(|b| (b.lower - p).max(p - b.upper)))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn window(t: &[f64], y: &[f64], range: (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    t.iter()
        .zip(y)
        .filter(|(&s, &p)| s >= range.0 && s <= range.1 && s > 0.0 && p > 0.0)
        .map(|(&s, &p)| (s, p.ln()))
        .unzip()
}

/// Tails of `λ^(u)` at every grid point, the trace sandwich where `t ≥ 0`,
/// and power fits over the given windows when they hold enough points.
pub fn tail_bound_scan(
    u: u32,
    t_grid: &[f64],
    right_window: (f64, f64),
    left_window: (f64, f64),
    params: &GridParams,
) -> Result<TailScan> {
    if t_grid.is_empty() {
        return Err(Error::Precondition("empty threshold grid".into()));
    }
    let rows = params
        .parallelism
        .map(t_grid, |&t| -> Result<(f64, f64, Option<TraceBounds>)> {
            let right = single_line_survival(u, t, params)?;
            let left = single_line_cdf(u, -t, params)?;
            let trace = if t >= 0.0 { Some(trace_bounds(u, t, params)?) } else { None };
            Ok((right, left, trace))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let p_right: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let p_left: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let trace = rows.iter().map(|r| r.2).collect();
    let (rs, ry) = window(t_grid, &p_right, right_window);
    let (ls, ly) = window(t_grid, &p_left, left_window);
    Ok(TailScan {
        u,
        t: t_grid.to_vec(),
        right_fit: fit_power(&rs, &ry, 1.5).ok(),
        left_fit: fit_power(&ls, &ly, 3.0).ok(),
        p_right,
        p_left,
        trace,
    })
}

/// `u₁ ≥ u₂ + u₂^{2/3} e^{(log u₁)^{2/3}}`: the separation regime of the
/// decorrelation estimate.
pub fn decorrelation_in_regime(u1: u32, u2: u32) -> bool {
    let (a, b) = (f64::from(u1), f64::from(u2));
    a >= b + b.powf(2.0 / 3.0) * a.ln().powf(2.0 / 3.0).exp()
}

/// `e^{−(2/3)(t₁^{3/2} + t₂^{3/2})}` with negative thresholds contributing 1.
pub fn tail_weight(t1: f64, t2: f64) -> f64 {
    let p = |t: f64| t.max(0.0).powf(1.5);
    (-(2.0 / 3.0) * (p(t1) + p(t2))).exp()
}

/// Smallest positive `C` with `values ≤ C·shape` on the selected points.
fn dominating_prefactor(values: &[f64], shape: &[f64], select: &[bool]) -> Option<f64> {
    let c = values
        .iter()
        .zip(shape)
        .zip(select)
        .filter(|(_, &s)| s)
        .map(|((&v, &g), _)| v / g)
        .fold(0.0, f64::max);
    (c > 0.0 && c.is_finite()).then_some(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecorrelationSweep {
    pub u2: u32,
    pub t1: f64,
    pub t2: f64,
    pub u1: Vec<u32>,
    pub e: Vec<f64>,
    pub in_regime: Vec<bool>,
    /// `(u₁u₂)^{1/12}/(√u₁ − √u₂)·e^{−(2/3)(t₁^{3/2}+t₂^{3/2})}`.
    pub shape: Vec<f64>,
    /// Smallest constant putting the in-regime `E` under `prefactor·shape`.
    pub prefactor: Option<f64>,
}

impl DecorrelationSweep {
    pub fn in_regime_values(&self) -> Vec<(u32, f64)> {
        self.u1
            .iter()
            .zip(&self.e)
            .zip(&self.in_regime)
            .filter(|(_, &r)| r)
            .map(|((&u, &e), _)| (u, e))
            .collect()
    }

    /// Largest increase of `E` between consecutive in-regime points.
    pub fn largest_increase(&self) -> f64 {
        self.in_regime_values()
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `E(u₂ + Δ, t₁; u₂, t₂)` for each separation `Δ > 0`, in the given order.
pub fn decorrelation_sweep(
    u2: u32,
    separations: &[u32],
    t1: f64,
    t2: f64,
    params: &GridParams,
) -> Result<DecorrelationSweep> {
    if let Some(&d) = separations.iter().find(|&&d| d == 0) {
        return Err(Error::Precondition(format!(
            "separation {d} puts both lines at u = {u2}; the decorrelation regime needs u1 > u2"
        )));
    }
    let u1: Vec<u32> = separations
        .iter()
        .map(|&d| {
            u2.checked_add(d)
                .ok_or_else(|| Error::Precondition(format!("separation {d} overflows")))
        })
        .collect::<Result<_>>()?;
    let e = params
        .parallelism
        .map(&u1, |&a| decorrelation_e(a, t1, u2, t2, params))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let in_regime: Vec<bool> = u1.iter().map(|&a| decorrelation_in_regime(a, u2)).collect();
    let w = tail_weight(t1, t2);
    let shape: Vec<f64> = u1
        .iter()
        .map(|&a| {
            let (a, b) = (f64::from(a), f64::from(u2));
            (a * b).powf(1.0 / 12.0) / (a.sqrt() - b.sqrt()) * w
        })
        .collect();
    let prefactor = dominating_prefactor(&e, &shape, &in_regime);
    Ok(DecorrelationSweep {
        u2,
        t1,
        t2,
        u1,
        e,
        in_regime,
        shape,
        prefactor,
    })
}

/// `u^{1/3+δ} ≤ Δu ≤ u^{2/3−δ}`.
pub fn correlation_in_regime(u: u32, delta_u: u32, delta: f64) -> bool {
    let (a, d) = (f64::from(u), f64::from(delta_u));
    a.powf(1.0 / 3.0 + delta) <= d && d <= a.powf(2.0 / 3.0 - delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSweep {
    pub u: u32,
    pub t1: f64,
    pub t2: f64,
    pub delta_t: f64,
    pub beta: f64,
    pub delta: f64,
    pub delta_u: Vec<u32>,
    pub f: Vec<f64>,
    pub in_regime: Vec<bool>,
    /// `Pr[Z > Δt·u^{1/3}/√Δu]`.
    pub normal_term: Vec<f64>,
    /// `Δu/u^{2/3−β}`.
    pub drift_term: Vec<f64>,
    /// `(drift + normal)·e^{−(2/3)(t₁^{3/2}+t₂^{3/2})}`.
    pub shape: Vec<f64>,
    pub prefactor: Option<f64>,
}

impl CorrelationSweep {
    pub fn bound(&self) -> Vec<f64> {
        let c = self.prefactor.unwrap_or(f64::NAN);
        self.shape.iter().map(|g| c * g).collect()
    }
}

/// `F(u, t₁; u + Δu, t₂)` for each `Δu > 0` with the two-term bound shape.
#[allow(clippy::too_many_arguments)]
pub fn correlation_sweep(
    u: u32,
    delta_u: &[u32],
    t1: f64,
    t2: f64,
    delta_t: f64,
    beta: f64,
    delta: f64,
    params: &GridParams,
) -> Result<CorrelationSweep> {
    if !(0.0..=1.0).contains(&delta_t) || t2 + delta_t > t1 + 1e-12 {
        return Err(Error::Precondition(format!(
            "correlation window needs 0 <= dt <= 1 and t2 + dt <= t1, got t1 = {t1}, t2 = {t2}, dt = {delta_t}"
        )));
    }
    if !(0.0 < beta && beta < delta && delta < 1.0 / 6.0) {
        return Err(Error::Precondition(format!(
            "correlation exponents need 0 < beta < delta < 1/6, got {beta} and {delta}"
        )));
    }
    if delta_u.contains(&0) {
        return Err(Error::Precondition("correlation sweep needs u2 > u1".into()));
    }
    let f = params
        .parallelism
        .map(delta_u, |&d| correlation_f(u, t1, u + d, t2, params))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let uf = f64::from(u);
    let w = tail_weight(t1, t2);
    let normal_term: Vec<f64> = delta_u
        .iter()
        .map(|&d| normal_sf(delta_t * uf.cbrt() / f64::from(d).sqrt()))
        .collect();
    let drift_term: Vec<f64> = delta_u.iter().map(|&d| f64::from(d) / uf.powf(2.0 / 3.0 - beta)).collect();
    let shape: Vec<f64> = drift_term.iter().zip(&normal_term).map(|(a, b)| (a + b) * w).collect();
    let in_regime: Vec<bool> = delta_u.iter().map(|&d| correlation_in_regime(u, d, delta)).collect();
    let prefactor = dominating_prefactor(&f, &shape, &in_regime);
    Ok(CorrelationSweep {
        u,
        t1,
        t2,
        delta_t,
        beta,
        delta,
        delta_u: delta_u.to_vec(),
        f,
        in_regime,
        normal_term,
        drift_term,
        shape,
        prefactor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert!(!decorrelation_in_regime(100, 60));
        assert!(decorrelation_in_regime(516, 60));
        assert!(decorrelation_in_regime(4096, 60));
        assert!(correlation_in_regime(40, 8, 0.05));
        assert!(!correlation_in_regime(40, 2, 0.05));
        assert!(!correlation_in_regime(40, 12, 0.05));
    }

    #[test]
    fn zero_separation_rejected() {
        let p = GridParams::with_order(8).without_refinement();
        assert!(matches!(
            decorrelation_sweep(60, &[0, 10], 0.0, 0.0, &p),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn prefactor_dominates_selected_points() {
        let c = dominating_prefactor(&[1.0, 4.0, 9.0], &[1.0, 1.0, 2.0], &[true, false, true]).unwrap();
        assert_eq!(c, 4.5);
        assert!(dominating_prefactor(&[0.0], &[1.0], &[true]).is_none());
    }
}
