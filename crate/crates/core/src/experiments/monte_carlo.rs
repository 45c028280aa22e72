//! Monte-Carlo estimates set against the determinant values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{single_line_cdf, GridParams};
use crate::kernel::scale_y;
use crate::par::Parallelism;
use crate::sim::{empirical_cdf, largest_eigenvalues_at, sample_array, sample_path, Estimate, PathEngine};

/// Fewest samples accepted by [`mc_vs_fredholm`].
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McComparison {
    pub u: u32,
    pub n_samples: usize,
    pub seed: u64,
    pub t: Vec<f64>,
    pub mc: Vec<Estimate>,
    pub fredholm: Vec<f64>,
    pub z: Vec<f64>,
}

impl McComparison {
    /// Number of grid points with `|z| > z_max`.
    pub fn exceedances(&self, z_max: f64) -> usize {
        self.z.iter().filter(|z| !(z.abs() <= z_max)).count()
    }
}

/// `λ^(u)` for arrays `(seed, 0..n)`, each from its own `u × u` corner.
pub fn sample_scaled_largest(u: u32, n: usize, seed: u64, par: Parallelism) -> Result<Vec<f64>> {
    let size = u as usize;
    par.map_range(n, |k| {
        let a = sample_array(seed, k as u64, size);
        largest_eigenvalues_at(&a, &[size]).map(|v| scale_y(u, v[0]))
    })
    .into_iter()
    .collect()
}

/// Empirical `Pr[λ^(u) ≤ t]` from `n_samples` arrays against `single_line_cdf`.
pub fn mc_vs_fredholm(u: u32, t_grid: &[f64], n_samples: usize, seed: u64, params: &GridParams) -> Result<McComparison> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "Monte-Carlo comparison needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    if t_grid.is_empty() {
        return Err(Error::Precondition("empty threshold grid".into()));
    }
    let samples = sample_scaled_largest(u, n_samples, seed, params.parallelism)?;
    let mc = t_grid
        .iter()
        .map(|&t| empirical_cdf(&samples, t))
        .collect::<Result<Vec<_>>>()?;
    let fredholm = t_grid
        .iter()
        .map(|&t| single_line_cdf(u, t, params))
        .collect::<Result<Vec<f64>>>()?;
    let z = mc.iter().zip(&fredholm).map(|(e, &f)| e.z_score(f, n_samples)).collect();
    Ok(McComparison {
        u,
        n_samples,
        seed,
        t: t_grid.to_vec(),
        mc,
        fredholm,
        z,
    })
}

/// Empirical `F(u, t₁; u + Δu, t₂) = Pr[λ^(u) ≥ t₁, λ^(u+Δu) < t₂]` from
/// spectral-chain paths, one estimate per `Δu`.
pub fn correlation_monte_carlo(
    u: u32,
    delta_u: &[u32],
    t1: f64,
    t2: f64,
    n_paths: usize,
    seed: u64,
    par: Parallelism,
) -> Result<Vec<Estimate>> {
    if n_paths == 0 || delta_u.is_empty() {
        return Err(Error::Precondition("correlation Monte Carlo needs paths and offsets".into()));
    }
    let n_max = (u + delta_u.iter().copied().max().unwrap_or(0)) as usize;
    let hits = par
        .map_range(n_paths, |k| -> Result<Vec<bool>> {
            let p = sample_path(seed, k as u64, n_max, PathEngine::SpectralChain)?;
            let first = p.scaled_at(u as usize) >= t1;
            Ok(delta_u
                .iter()
                .map(|&d| first && p.scaled_at((u + d) as usize) < t2)
                .collect())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((0..delta_u.len())
        .map(|j| Estimate::binomial(hits.iter().filter(|h| h[j]).count(), n_paths))
        .collect())
}
