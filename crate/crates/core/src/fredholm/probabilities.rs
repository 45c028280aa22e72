//! Gap probabilities of the minor process and of the Airy process as
//! Fredholm determinants.
//!
//! All thresholds are in edge-scaled coordinates: `single_line_cdf(u, t)` is
//! `Pr[λ^(u) ≤ t]` for the rescaled largest eigenvalue
//! `λ^(u) = (λ̃^(u) − √(2u)) √2 u^{1/6}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Parallelism;

use super::det::{identity_minus_from_spectrum, lu_determinant, symmetric_eigenvalues};
use super::operator::{BlockOperator, DiscretizedOperator, LineCoupling};
use super::quadrature::{build_grid, QuadratureGrid};

/// Largest line index accepted by the determinant routines.
pub const MAX_CERTIFIED_U: u32 = 4096;
/// Smallest scaled threshold accepted on a GUE line.
pub const MIN_THRESHOLD: f64 = -10.0;
pub const TRACY_WIDOM_MIN: f64 = -8.0;
pub const TRACY_WIDOM_MAX: f64 = 10.0;
/// Slack allowed outside `[0, 1]` before a probability is reported as broken.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Quadrature settings shared by every determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Gauss–Legendre nodes per line.
    pub order: usize,
    /// Truncation length; `None` selects [`default_length`].
    pub length: Option<f64>,
    /// Recompute at a finer order and compare.
    pub refine: bool,
    /// Order of the comparison run; `None` means twice `order`.
    #[serde(default)]
    pub fine_order: Option<usize>,
    /// Largest accepted change under refinement.
    pub tolerance: f64,
    #[serde(skip)]
    pub parallelism: Parallelism,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            order: 64,
            length: None,
            refine: true,
            fine_order: None,
            tolerance: 1e-6,
            parallelism: Parallelism::Auto,
        }
    }
}

impl GridParams {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }

    fn length_for(&self, t: f64) -> f64 {
        self.length.unwrap_or_else(|| default_length(t))
    }

    fn grid(&self, t: f64, order: usize) -> Result<QuadratureGrid> {
        build_grid(t, self.length_for(t), order)
    }
}

/// Truncation length for a restriction to `[t, ∞)`: at least 15, and far
/// enough to reach 12, where every kernel used here is below `1e-20`.
pub fn default_length(t: f64) -> f64 {
    (12.0 - t).max(15.0)
}

#[derive(Clone, Copy, PartialEq)]
enum Agreement {
    Absolute,
    Relative,
}

/// Evaluates `f` at the configured order and, if requested, at the fine
/// order; returns the finer value.
fn refined(
    params: &GridParams,
    context: impl Fn() -> String,
    agreement: Agreement,
    f: impl Fn(usize) -> Result<f64>,
) -> Result<f64> {
    let coarse = f(params.order)?;
    if !params.refine {
        return Ok(coarse);
    }
    let fine = f(params.fine_order.unwrap_or(2 * params.order))?;
    let scale = match agreement {
        Agreement::Absolute => 1.0,
        Agreement::Relative => fine.abs(),
    };
    if (fine - coarse).abs() > params.tolerance * scale || !fine.is_finite() {
        return Err(Error::NonConvergence {
            context: context(),
            coarse,
            fine,
        });
    }
    Ok(fine)
}

fn check_line(u: u32, t: f64) -> Result<()> {
    if u == 0 || u > MAX_CERTIFIED_U {
        return Err(Error::Domain {
            what: "line index",
            value: f64::from(u),
            domain: "[1, 4096]",
        });
    }
    if !(t >= MIN_THRESHOLD) || !t.is_finite() {
        return Err(Error::Domain {
            what: "scaled threshold",
            value: t,
            domain: "[-10, inf)",
        });
    }
    Ok(())
}

fn check_probability(p: f64, context: &str) -> Result<f64> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::NonConvergence {
            context: format!("{context}: determinant {p} is not a probability"),
            coarse: p,
            fine: p,
        });
    }
    Ok(p)
}

/// `(det(I − K), 1 − det(I − K))` for a symmetric discretization.
fn symmetric_gap(op: &DiscretizedOperator) -> (f64, f64) {
    let n = op.rows();
    let mut a = op.entries.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    identity_minus_from_spectrum(&symmetric_eigenvalues(n, &a))
}

fn single_line_parts(u: u32, t: f64, params: &GridParams, order: usize) -> Result<(f64, f64)> {
    let grid = params.grid(t, order)?;
    let op = DiscretizedOperator::minor(u, &grid, u, &grid, params.parallelism);
    Ok(symmetric_gap(&op))
}

/// `Pr[λ^(u) ≤ t]` before clamping to `[0, 1]`.
pub fn single_line_cdf_raw(u: u32, t: f64, params: &GridParams) -> Result<f64> {
    check_line(u, t)?;
    refined(
        params,
        || format!("single-line cdf at u = {u}, t = {t}"),
        Agreement::Absolute,
        |m| single_line_parts(u, t, params, m).map(|p| p.0),
    )
}

/// `Pr[λ^(u) ≤ t] = det(I − K̃ restricted to [t, ∞))`.
pub fn single_line_cdf(u: u32, t: f64, params: &GridParams) -> Result<f64> {
    let p = single_line_cdf_raw(u, t, params)?;
    Ok(check_probability(p, "single-line cdf")?.clamp(0.0, 1.0))
}

/// `Pr[λ^(u) > t]`, accurate to relative precision far into the right tail.
pub fn single_line_survival(u: u32, t: f64, params: &GridParams) -> Result<f64> {
    check_line(u, t)?;
    let p = refined(
        params,
        || format!("single-line survival at u = {u}, t = {t}"),
        Agreement::Relative,
        |m| single_line_parts(u, t, params, m).map(|p| p.1),
    )?;
    Ok(check_probability(p, "single-line survival")?.clamp(0.0, 1.0))
}

fn joint_at_order(
    u1: u32,
    t1: f64,
    u2: u32,
    t2: f64,
    coupling: LineCoupling,
    params: &GridParams,
    order: usize,
) -> Result<f64> {
    let g1 = params.grid(t1, order)?;
    let g2 = params.grid(t2, order)?;
    let op = BlockOperator::minor([u1, u2], [&g1, &g2], coupling, params.parallelism);
    Ok(lu_determinant(op.size(), &op.identity_minus()))
}

/// `Pr[λ^(u₁) < t₁, λ^(u₂) < t₂]` for the chosen two-line kernel, unclamped.
pub fn joint_cdf_raw(
    u1: u32,
    t1: f64,
    u2: u32,
    t2: f64,
    coupling: LineCoupling,
    params: &GridParams,
) -> Result<f64> {
    check_line(u1, t1)?;
    check_line(u2, t2)?;
    if u1 == u2 {
        return single_line_cdf_raw(u1, t1.min(t2), params);
    }
    refined(
        params,
        || format!("joint cdf at ({u1}, {t1}; {u2}, {t2})"),
        Agreement::Absolute,
        |m| joint_at_order(u1, t1, u2, t2, coupling, params, m),
    )
}

/// `Pr[λ^(u₁) < t₁, λ^(u₂) < t₂] = det(I − K̃ restricted to the two half-lines)`.
pub fn joint_cdf(u1: u32, t1: f64, u2: u32, t2: f64, params: &GridParams) -> Result<f64> {
    let p = joint_cdf_raw(u1, t1, u2, t2, LineCoupling::Coupled, params)?;
    Ok(check_probability(p, "joint cdf")?.clamp(0.0, 1.0))
}

/// The same determinant with `K̃ᴰ`; equals the product of the marginals.
pub fn joint_cdf_decorrelated(u1: u32, t1: f64, u2: u32, t2: f64, params: &GridParams) -> Result<f64> {
    let p = joint_cdf_raw(u1, t1, u2, t2, LineCoupling::Decorrelated, params)?;
    Ok(check_probability(p, "decorrelated joint cdf")?.clamp(0.0, 1.0))
}

/// `E = |Pr[λ^(u₁) < t₁, λ^(u₂) < t₂] − Pr[λ^(u₁) < t₁] Pr[λ^(u₂) < t₂]|`.
pub fn decorrelation_e(u1: u32, t1: f64, u2: u32, t2: f64, params: &GridParams) -> Result<f64> {
    let joint = joint_cdf_raw(u1, t1, u2, t2, LineCoupling::Coupled, params)?;
    let f1 = single_line_cdf_raw(u1, t1, params)?;
    let f2 = single_line_cdf_raw(u2, t2, params)?;
    Ok((joint - f1 * f2).abs())
}

/// `E` in survival form: `|Pr[λ^(u₁) ≥ t₁, λ^(u₂) ≥ t₂] − Pr[λ^(u₁) ≥ t₁] Pr[λ^(u₂) ≥ t₂]|`.
pub fn decorrelation_e_survival(u1: u32, t1: f64, u2: u32, t2: f64, params: &GridParams) -> Result<f64> {
    let joint = joint_cdf_raw(u1, t1, u2, t2, LineCoupling::Coupled, params)?;
    let s1 = single_line_survival(u1, t1, params)?;
    let s2 = single_line_survival(u2, t2, params)?;
    // Pr[both above] = 1 − Pr[first below] − Pr[second below] + Pr[both below].
    let both_above = s1 + s2 - (1.0 - joint);
    Ok((both_above - s1 * s2).abs())
}

/// `F = |Pr[λ^(u₁) < t₁, λ^(u₂) < t₂] − Pr[λ^(u₂) < t₂]| = Pr[λ^(u₁) ≥ t₁, λ^(u₂) < t₂]`.
pub fn correlation_f(u1: u32, t1: f64, u2: u32, t2: f64, params: &GridParams) -> Result<f64> {
    if u1 >= u2 {
        return Err(Error::Precondition(format!(
            "correlation estimate needs u1 < u2, got {u1} and {u2}"
        )));
    }
    let joint = joint_cdf_raw(u1, t1, u2, t2, LineCoupling::Coupled, params)?;
    let f2 = single_line_cdf_raw(u2, t2, params)?;
    Ok((joint - f2).abs())
}

fn check_tracy_widom(s: f64) -> Result<()> {
    if (TRACY_WIDOM_MIN..=TRACY_WIDOM_MAX).contains(&s) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "Tracy-Widom argument",
            value: s,
            domain: "[-8, 10]",
        })
    }
}

fn tracy_widom_parts(s: f64, params: &GridParams, order: usize) -> Result<(f64, f64)> {
    let grid = params.grid(s, order)?;
    let op = DiscretizedOperator::airy(&grid)?;
    Ok(symmetric_gap(&op))
}

/// `F_TW(s) = det(I − K_Ai restricted to [s, ∞))`.
pub fn tracy_widom_cdf(s: f64, params: &GridParams) -> Result<f64> {
    check_tracy_widom(s)?;
    let p = refined(
        params,
        || format!("Tracy-Widom cdf at s = {s}"),
        Agreement::Absolute,
        |m| tracy_widom_parts(s, params, m).map(|p| p.0),
    )?;
    Ok(check_probability(p, "Tracy-Widom cdf")?.clamp(0.0, 1.0))
}

/// `1 − F_TW(s)`, accurate to relative precision in the right tail.
pub fn tracy_widom_survival(s: f64, params: &GridParams) -> Result<f64> {
    check_tracy_widom(s)?;
    let p = refined(
        params,
        || format!("Tracy-Widom survival at s = {s}"),
        Agreement::Relative,
        |m| tracy_widom_parts(s, params, m).map(|p| p.1),
    )?;
    Ok(check_probability(p, "Tracy-Widom survival")?.clamp(0.0, 1.0))
}

/// `F_TW(s)` with a relative refinement check, for the far left tail.
pub fn tracy_widom_cdf_relative(s: f64, params: &GridParams) -> Result<f64> {
    check_tracy_widom(s)?;
    refined(
        params,
        || format!("Tracy-Widom cdf at s = {s}"),
        Agreement::Relative,
        |m| tracy_widom_parts(s, params, m).map(|p| p.0),
    )
}

/// Trace sandwich for the right tail of one line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceBounds {
    /// `tr(πK̃π) = ∫_t^∞ K̃(ỹ,ỹ) μ(dỹ)`.
    pub trace: f64,
    /// `1 − e^{−tr} ≤ Pr[λ^(u) > t]`.
    pub lower: f64,
    /// `Pr[λ^(u) > t] ≤ tr`.
    pub upper: f64,
}

/// `(1 − e^{−tr}, tr)` with `tr` the trace of the restricted kernel.
pub fn trace_bounds(u: u32, t: f64, params: &GridParams) -> Result<TraceBounds> {
    check_line(u, t)?;
    if t < 0.0 {
        return Err(Error::Domain {
            what: "trace-bound threshold",
            value: t,
            domain: "[0, inf)",
        });
    }
    let trace = refined(
        params,
        || format!("trace at u = {u}, t = {t}"),
        Agreement::Relative,
        |m| {
            let grid = params.grid(t, m)?;
            Ok(DiscretizedOperator::minor(u, &grid, u, &grid, params.parallelism).trace())
        },
    )?;
    Ok(TraceBounds {
        trace,
        lower: -(-trace).exp_m1(),
        upper: trace,
    })
}
