//! Coupled largest-eigenvalue paths and their extreme-value statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::scale_y;
use crate::par::Parallelism;

use super::array::{sample_row, GaussianMinorArray};
use super::chain::bordered_spectrum;
use super::dense::largest_eigenvalue;
use super::rng::GaussianStream;

/// `λ̃^(N)` and `λ^(N) = (λ̃^(N) − √(2N))·√2·N^{1/6}` for `N = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPath {
    pub n_max: usize,
    pub lambda_raw: Vec<f64>,
    pub lambda_scaled: Vec<f64>,
}

impl EigenPath {
    /// Builds the path from `λ̃^(1..=n)`.
    pub fn from_raw(lambda_raw: Vec<f64>) -> Self {
        let lambda_scaled = lambda_raw
            .iter()
            .enumerate()
            .map(|(i, &l)| scale_y(i as u32 + 1, l))
            .collect();
        Self {
            n_max: lambda_raw.len(),
            lambda_raw,
            lambda_scaled,
        }
    }

    /// `λ^(n)` for 1-based `n`.
    pub fn scaled_at(&self, n: usize) -> f64 {
        self.lambda_scaled[n - 1]
    }
}

/// How a path is produced from its `(seed, stream_id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PathEngine {
    /// Largest eigenvalue of every leading minor of the materialized array;
    /// `O(N_max⁴)`.
    Dense,
    /// Secular-equation recursion over the minor spectra; `O(N_max³)`, same
    /// law as [`PathEngine::Dense`] but a different realization.
    #[default]
    SpectralChain,
}

/// Largest eigenvalue of each leading minor of `array`.
pub fn eigen_path(array: &GaussianMinorArray) -> Result<EigenPath> {
    let ns: Vec<usize> = (1..=array.size).collect();
    largest_eigenvalues_at(array, &ns).map(EigenPath::from_raw)
}

/// `λ̃^(N)` at the requested minor sizes only.
pub fn largest_eigenvalues_at(array: &GaussianMinorArray, ns: &[usize]) -> Result<Vec<f64>> {
    ns.iter()
        .map(|&n| {
            if n == 0 || n > array.size {
                return Err(Error::Precondition(format!(
                    "minor size {n} outside 1..={}",
                    array.size
                )));
            }
            largest_eigenvalue(n, &array.minor(n)).map_err(|e| annotate(e, n))
        })
        .collect()
}

fn annotate(e: Error, n: usize) -> Error {
    match e {
        Error::NonConvergence { context, coarse, fine } => Error::NonConvergence {
            context: format!("{context} at N = {n}"),
            coarse,
            fine,
        },
        other => other,
    }
}

/// Full minor spectra along the chain, handing each to `visit(N, spectrum)`.
pub fn chain_spectra(seed: u64, stream_id: u64, n_max: usize, mut visit: impl FnMut(usize, &[f64])) -> Result<()> {
    let mut stream = GaussianStream::new(seed, stream_id);
    let mut lam: Vec<f64> = Vec::new();
    let mut weights = Vec::with_capacity(n_max);
    for i in 0..n_max {
        let row = sample_row(&mut stream, i);
        weights.clear();
        weights.extend(row[..i].iter().map(|z| z.norm_sqr()));
        lam = bordered_spectrum(&lam, &weights, row[i].re).map_err(|e| annotate(e, i + 1))?;
        visit(i + 1, &lam);
    }
    Ok(())
}

/// One path by the spectral chain, using the array rows of `(seed, stream_id)`.
pub fn chain_path(seed: u64, stream_id: u64, n_max: usize) -> Result<EigenPath> {
    let mut raw = Vec::with_capacity(n_max);
    chain_spectra(seed, stream_id, n_max, |_, lam| raw.push(lam[lam.len() - 1]))?;
    Ok(EigenPath::from_raw(raw))
}

/// One path for `(seed, stream_id)` with the chosen engine.
pub fn sample_path(seed: u64, stream_id: u64, n_max: usize, engine: PathEngine) -> Result<EigenPath> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be positive".into()));
    }
    match engine {
        PathEngine::Dense => eigen_path(&super::array::sample_array(seed, stream_id, n_max)),
        PathEngine::SpectralChain => chain_path(seed, stream_id, n_max),
    }
}

/// Paths with stream ids `first_stream..first_stream + count`, in order.
pub fn sample_paths(
    seed: u64,
    first_stream: u64,
    count: usize,
    n_max: usize,
    engine: PathEngine,
    par: Parallelism,
) -> Result<Vec<EigenPath>> {
    par.map_range(count, |k| sample_path(seed, first_stream + k as u64, n_max, engine))
        .into_iter()
        .collect()
}

/// Running extremes of the two fractional-logarithm functionals, indexed
/// from `n = 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStatistics {
    /// `max_{3≤m≤n} λ^(m)/(log m)^{2/3}` for `n = 3..=n_max`.
    pub running_max_frac23: Vec<f64>,
    /// `min_{3≤m≤n} λ^(m)/(log m)^{1/3}` for `n = 3..=n_max`.
    pub running_min_frac13: Vec<f64>,
}

/// Running extremes of `λ^(n)` under the two normalizations.
pub fn running_extremes(scaled: &[f64]) -> Result<PathStatistics> {
    if scaled.len() < 3 {
        return Err(Error::Precondition(format!(
            "running extremes need n_max >= 3, got {}",
            scaled.len()
        )));
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    let mut out = PathStatistics {
        running_max_frac23: Vec::with_capacity(scaled.len() - 2),
        running_min_frac13: Vec::with_capacity(scaled.len() - 2),
    };
    for (i, &l) in scaled.iter().enumerate().skip(2) {
        let log_n = ((i + 1) as f64).ln();
        hi = hi.max(l / log_n.powf(2.0 / 3.0));
        lo = lo.min(l / log_n.cbrt());
        out.running_max_frac23.push(hi);
        out.running_min_frac13.push(lo);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// `λ^(N_k) ≥ c (log N_k)^{2/3}`.
    Upper,
    /// `λ^(N_k) ≤ −c (log N_k)^{1/3}`.
    Lower,
}

/// Event frequencies along the sparse subsequence `N_k = ⌈k^α⌉`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTable {
    pub alpha: f64,
    pub c: f64,
    pub tail: Tail,
    pub n_k: Vec<usize>,
    /// Thresholds `±c (log N_k)^{2/3 or 1/3}`.
    pub thresholds: Vec<f64>,
    /// Fraction of paths on which the `k`-th event occurs.
    pub frequency: Vec<f64>,
    /// Mean over paths of `S_k = Σ_{j≤k} 1[E_j]`.
    pub mean_s: Vec<f64>,
    /// Set when longer paths had terms beyond the shortest path's length.
    pub truncated: bool,
}

/// `⌈k^α⌉` for `k = 1, 2, …` while at most `limit`.
pub fn sparse_subsequence(alpha: f64, limit: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for k in 1usize.. {
        // Round away float noise so exact powers stay exact.
        let v = (k as f64).powf(alpha);
        let n = if (v - v.round()).abs() < 1e-9 * v { v.round() } else { v.ceil() } as usize;
        if n > limit {
            break;
        }
        out.push(n);
    }
    out
}

/// Event threshold at minor size `n`.
pub fn event_threshold(tail: Tail, c: f64, n: usize) -> f64 {
    let log_n = (n as f64).ln();
    match tail {
        Tail::Upper => c * log_n.powf(2.0 / 3.0),
        Tail::Lower => -c * log_n.cbrt(),
    }
}

/// Counts the sparse-subsequence events on every path.
pub fn subsequence_events(paths: &[EigenPath], alpha: f64, c: f64, tail: Tail) -> Result<EventTable> {
    if !(alpha > 1.0) || !(c > 0.0) {
        return Err(Error::Precondition(format!(
            "subsequence events need alpha > 1 and c > 0, got {alpha} and {c}"
        )));
    }
    if paths.is_empty() {
        return Err(Error::Precondition("no paths".into()));
    }
    let shortest = paths.iter().map(|p| p.n_max).min().unwrap_or(0);
    let longest = paths.iter().map(|p| p.n_max).max().unwrap_or(0);
    let n_k = sparse_subsequence(alpha, shortest);
    let truncated = sparse_subsequence(alpha, longest).len() > n_k.len();
    let thresholds: Vec<f64> = n_k.iter().map(|&n| event_threshold(tail, c, n)).collect();
    let mut counts = vec![0usize; n_k.len()];
    let mut s_sum = vec![0usize; n_k.len()];
    for p in paths {
        let mut s = 0;
        for (k, (&n, &th)) in n_k.iter().zip(&thresholds).enumerate() {
            let l = p.scaled_at(n);
            let hit = match tail {
                Tail::Upper => l >= th,
                Tail::Lower => l <= th,
            };
            if hit {
                counts[k] += 1;
                s += 1;
            }
            s_sum[k] += s;
        }
    }
    let m = paths.len() as f64;
    Ok(EventTable {
        alpha,
        c,
        tail,
        n_k,
        thresholds,
        frequency: counts.iter().map(|&x| x as f64 / m).collect(),
        mean_s: s_sum.iter().map(|&x| x as f64 / m).collect(),
        truncated,
    })
}
