use serde::{Deserialize, Serialize};

/// A point `(u, y)` on the line `{u} × ℝ`, in unscaled eigenvalue units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinePoint {
    pub u: u32,
    pub y: f64,
}

/// A point `(u, ỹ)` in edge-scaled coordinates `ỹ = √2 u^{1/6} y − 2u^{2/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub u: u32,
    pub y_tilde: f64,
}

impl LinePoint {
    pub fn new(u: u32, y: f64) -> Self {
        assert!(u >= 1, "line index must be positive");
        Self { u, y }
    }
}

impl ScaledPoint {
    pub fn new(u: u32, y_tilde: f64) -> Self {
        assert!(u >= 1, "line index must be positive");
        Self { u, y_tilde }
    }
}

/// `√2 u^{1/6}`, the local stretch of the edge scaling; also `dỹ/dy`.
pub fn edge_stretch(u: u32) -> f64 {
    std::f64::consts::SQRT_2 * f64::from(u).powf(1.0 / 6.0)
}

/// `2u^{2/3}`, the scaled image of the origin's offset.
fn edge_shift(u: u32) -> f64 {
    2.0 * f64::from(u).powf(2.0 / 3.0)
}

/// `ỹ` for an unscaled `y` on line `u`.
pub fn scale_y(u: u32, y: f64) -> f64 {
    edge_stretch(u).mul_add(y, -edge_shift(u))
}

/// `y` for a scaled `ỹ` on line `u`.
pub fn unscale_y(u: u32, y_tilde: f64) -> f64 {
    (y_tilde + edge_shift(u)) / edge_stretch(u)
}

pub fn to_scaled(p: LinePoint) -> ScaledPoint {
    ScaledPoint {
        u: p.u,
        y_tilde: scale_y(p.u, p.y),
    }
}

pub fn from_scaled(p: ScaledPoint) -> LinePoint {
    LinePoint {
        u: p.u,
        y: unscale_y(p.u, p.y_tilde),
    }
}
