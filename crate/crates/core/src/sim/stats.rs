//! Empirical distribution summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// The binomial estimate from `hits` successes in `n` trials.
    pub fn binomial(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            value: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }

    /// `(value − p) / √(p(1−p)/n)` for a reference probability `p`.
    ///
    /// The error is taken under the reference, not from the sample: with a
    /// handful of hits the sample error shrinks with the count and inflates
    /// `|z|` for rare events.
    pub fn z_score(&self, reference: f64, n: usize) -> f64 {
        let se = (reference * (1.0 - reference) / n as f64).sqrt();
        if se > 0.0 {
            (self.value - reference) / se
        } else if self.value == reference {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Fraction of `samples` at most `t`, with its standard error.
pub fn empirical_cdf(samples: &[f64], t: f64) -> Result<Estimate> {
    if samples.is_empty() {
        return Err(Error::Precondition("empirical cdf of no samples".into()));
    }
    Ok(Estimate::binomial(samples.iter().filter(|&&x| x <= t).count(), samples.len()))
}

/// `sup_x |F_n(x) − F(x)|` for the empirical law of `samples`.
pub fn ks_distance(samples: &[f64], mut cdf: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Precondition("KS distance of no samples".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
    }
    d
}

/// Sample mean and unbiased variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Median by sorting a copy.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_score_uses_reference_error() {
        // 2 hits where 6.6 are expected: about −1.8 under the reference,
        // where the sample error would give about −3.3.
        let e = Estimate::binomial(2, 2000);
        let z = e.z_score(0.0033, 2000);
        assert!((z - (0.001 - 0.0033) / (0.0033f64 * 0.9967 / 2000.0).sqrt()).abs() < 1e-12);
        assert!((-1.9..-1.7).contains(&z));
        assert_eq!(Estimate::binomial(0, 10).z_score(0.0, 10), 0.0);
        assert_eq!(Estimate::binomial(1, 10).z_score(0.0, 10), f64::INFINITY);
    }

    #[test]
    fn cdf_extremes() {
        let xs = [1.0, 2.0, 3.0];
        let all = empirical_cdf(&xs, 5.0).unwrap();
        assert_eq!((all.value, all.std_error), (1.0, 0.0));
        assert_eq!(empirical_cdf(&xs, 0.0).unwrap().value, 0.0);
        assert!(empirical_cdf(&[], 0.0).is_err());
    }

    #[test]
    fn ks_of_uniform_grid() {
        let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_distance(&xs, |x| Ok(x.clamp(0.0, 1.0))).unwrap();
        assert!((d - 0.05).abs() < 1e-12);
    }

    #[test]
    fn two_sample_extremes() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
