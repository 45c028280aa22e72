//! Double contour integral representation of the minor kernel for `u₁ >= u₂`:
//!
//! `K = 2^{u₁−u₂} / (2(πi)²) ∬ e^{z₁²−2z₁y₁} z₁^{u₁} / (e^{z₂²−2z₂y₂} z₂^{u₂}) dz₁ dz₂ / (z₁ − z₂)`
//!
//! over piecewise-linear contours: `z₁` leaves a real base point at angle
//! `±π/3` for a length `δ₁√(u₁/2)` and continues vertically; `z₂` leaves its
//! base point at angle `±2π/3` for a length `δ₂√(u₂/2)` and continues
//! horizontally to the left. Both are oriented upward. The base points sit
//! at the real saddle points of the edge-scaled integrands where those are
//! available, with the `z₁` base kept strictly to the right of the `z₂` base,
//! so the contours never meet.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fredholm::quadrature::gauss_legendre;
use crate::special::LogScaledValue;

use super::coords::scale_y;

/// Segment length fraction of the `z₁` contour.
pub const DELTA_1: f64 = 0.5;
/// Segment length fraction of the `z₂` contour.
pub const DELTA_2: f64 = 2.0;
/// Largest line index at which the oracle is certified.
pub const ORACLE_MAX_U: u32 = 512;

/// Rays stop once the log-integrand falls this far below its maximum.
const LOG_DROP: f64 = 40.0;
/// Panel length in edge-scaled units.
const PANEL: f64 = 0.5;
/// Separation of the two base points in edge-scaled units.
const GAP: f64 = 0.75;
const COARSE_ORDER: usize = 16;
const FINE_ORDER: usize = 24;
const AGREEMENT: f64 = 1e-8;
const MAX_RAY_PANELS: usize = 4000;

struct Node {
    log_value: Complex64,
    z: Complex64,
    weight: Complex64,
}

/// One of the two contour integrands, `exp(sign · (z² − 2zy + u log z))`.
struct Factor {
    u: f64,
    y: f64,
    sign: f64,
}

impl Factor {
    fn log_at(&self, z: Complex64) -> Complex64 {
        self.sign * (z * z - 2.0 * z * self.y + self.u * z.ln())
    }
}

/// Gauss–Legendre nodes along `start + t · dir`, `t ∈ [0, length]`, split
/// into panels no longer than `panel`.
fn segment_nodes(
    factor: &Factor,
    rule: &(Vec<f64>, Vec<f64>),
    start: Complex64,
    dir: Complex64,
    length: f64,
    panel: f64,
    out: &mut Vec<Node>,
) {
    let panels = (length / panel).ceil().max(1.0) as usize;
    let width = length / panels as f64;
    for p in 0..panels {
        let a = p as f64 * width;
        for (s, w) in rule.0.iter().zip(&rule.1) {
            let t = a + 0.5 * width * (s + 1.0);
            let z = start + dir * t;
            out.push(Node {
                log_value: factor.log_at(z),
                z,
                weight: dir * (0.5 * width * w),
            });
        }
    }
}

/// Nodes on the ray `start + t · dir`, `t >= 0`, truncated once the
/// integrand has dropped by [`LOG_DROP`] below `reference`. `orientation`
/// is `-1` when the contour runs towards `start`.
#[allow(clippy::too_many_arguments)]
fn ray_nodes(
    factor: &Factor,
    rule: &(Vec<f64>, Vec<f64>),
    start: Complex64,
    dir: Complex64,
    panel: f64,
    reference: f64,
    orientation: f64,
    out: &mut Vec<Node>,
) -> Result<()> {
    let mut a = 0.0;
    for _ in 0..MAX_RAY_PANELS {
        let end = factor.log_at(start + dir * (a + panel)).re;
        for (s, w) in rule.0.iter().zip(&rule.1) {
            let t = a + 0.5 * panel * (s + 1.0);
            let z = start + dir * t;
            out.push(Node {
                log_value: factor.log_at(z),
                z,
                weight: dir * (orientation * 0.5 * panel * w),
            });
        }
        a += panel;
        if end < reference - LOG_DROP {
            return Ok(());
        }
    }
    Err(Error::NonConvergence {
        context: "contour ray did not decay".into(),
        coarse: a,
        fine: f64::NAN,
    })
}

/// The closed-up contour `conj(ray) ∪ conj(segment) ∪ segment ∪ ray`.
#[allow(clippy::too_many_arguments)]
fn contour(
    factor: &Factor,
    order: usize,
    base: f64,
    angle: f64,
    length: f64,
    ray_dir: Complex64,
    panel: f64,
) -> Result<Vec<Node>> {
    let rule = gauss_legendre(order)?;
    let up = Complex64::from_polar(1.0, angle);
    let down = up.conj();
    let corner = base + up * length;
    let reference = factor
        .log_at(Complex64::new(base, 0.0))
        .re
        .max(factor.log_at(corner).re);
    let mut nodes = Vec::new();
    // Lower ray, traversed towards the lower corner.
    ray_nodes(factor, &rule, corner.conj(), ray_dir.conj(), panel, reference, -1.0, &mut nodes)?;
    // Lower segment, from the lower corner to the base point.
    let mut lower = Vec::new();
    segment_nodes(factor, &rule, Complex64::new(base, 0.0), down, length, panel, &mut lower);
    for n in &mut lower {
        n.weight = -n.weight;
    }
    nodes.extend(lower);
    segment_nodes(factor, &rule, Complex64::new(base, 0.0), up, length, panel, &mut nodes);
    ray_nodes(factor, &rule, corner, ray_dir, panel, reference, 1.0, &mut nodes)?;
    Ok(nodes)
}

fn evaluate(u1: u32, y1: f64, u2: u32, y2: f64, order: usize) -> Result<LogScaledValue> {
    let (u1f, u2f) = (f64::from(u1), f64::from(u2));
    let stretch = |u: f64| u.powf(1.0 / 6.0) / std::f64::consts::SQRT_2;
    let (s1, s2) = (stretch(u1f), stretch(u2f));
    let (c1, c2) = ((0.5 * u1f).sqrt(), (0.5 * u2f).sqrt());
    let yt1 = scale_y(u1, y1);
    let yt2 = scale_y(u2, y2);

    let base2 = c2 + s2 * (-yt2.max(0.0).sqrt()).max(-0.5 * u2f.powf(1.0 / 3.0));
    let base1 = (c1 + s1 * yt1.max(0.0).sqrt()).max(base2 + GAP * s1.max(s2));

    let f1 = Factor { u: u1f, y: y1, sign: 1.0 };
    let f2 = Factor { u: u2f, y: y2, sign: -1.0 };
    let n1 = contour(
        &f1,
        order,
        base1,
        std::f64::consts::FRAC_PI_3,
        DELTA_1 * c1,
        Complex64::i(),
        PANEL * s1,
    )?;
    let n2 = contour(
        &f2,
        order,
        base2,
        2.0 * std::f64::consts::FRAC_PI_3,
        DELTA_2 * c2,
        Complex64::new(-1.0, 0.0),
        PANEL * s2,
    )?;

    let r1 = n1.iter().map(|n| n.log_value.re).fold(f64::NEG_INFINITY, f64::max);
    let r2 = n2.iter().map(|n| n.log_value.re).fold(f64::NEG_INFINITY, f64::max);
    let w1: Vec<Complex64> = n1.iter().map(|n| n.weight * (n.log_value - r1).exp()).collect();
    let w2: Vec<Complex64> = n2.iter().map(|n| n.weight * (n.log_value - r2).exp()).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (a, wa) in n1.iter().zip(&w1) {
        let mut inner = Complex64::new(0.0, 0.0);
        for (b, wb) in n2.iter().zip(&w2) {
            inner += wb / (a.z - b.z);
        }
        total += wa * inner;
    }
    // 1/(2(πi)²) = −1/(2π²).
    let value = -total.re / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    Ok(LogScaledValue::from_f64(value).scale_log(r1 + r2 + (u1f - u2f) * std::f64::consts::LN_2))
}

/// `K(u₁,y₁;u₂,y₂)` for `u₁ >= u₂` by direct quadrature of the double
/// contour integral, independent of the Hermite-function machinery.
///
/// Two Gauss–Legendre orders are compared; disagreement beyond `1e-8`
/// relative is reported as non-convergence.
pub fn kernel_contour_oracle(u1: u32, y1: f64, u2: u32, y2: f64) -> Result<LogScaledValue> {
    if u2 < 1 || u1 < u2 {
        return Err(Error::Precondition(format!(
            "contour oracle needs u1 >= u2 >= 1, got u1 = {u1}, u2 = {u2}"
        )));
    }
    if u1 > ORACLE_MAX_U {
        return Err(Error::Domain {
            what: "contour oracle line index",
            value: f64::from(u1),
            domain: "[1, 512]",
        });
    }
    let coarse = evaluate(u1, y1, u2, y2, COARSE_ORDER)?;
    let fine = evaluate(u1, y1, u2, y2, FINE_ORDER)?;
    let diff = fine.sub(coarse).abs();
    if diff.cmp_magnitude(fine.abs().scale_log(AGREEMENT.ln())).is_gt() {
        return Err(Error::NonConvergence {
            context: format!("contour oracle at ({u1}, {y1}; {u2}, {y2})"),
            coarse: coarse.to_f64(),
            fine: fine.to_f64(),
        });
    }
    Ok(fine)
}
