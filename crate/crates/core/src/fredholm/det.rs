//! Dense determinants and symmetric spectra.

/// `det(A)` for a row-major `n × n` table by LU with partial pivoting.
pub fn lu_determinant(n: usize, a: &[f64]) -> f64 {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let (pivot, best) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for r in (col + 1)..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for k in (col + 1)..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
            }
        }
    }
    det
}

/// Eigenvalues of a symmetric row-major `n × n` table, ascending, by cyclic
/// Jacobi rotations.
///
/// Jacobi is used for its small relative error on the tiny eigenvalues that
/// govern far-tail probabilities.
pub fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    for sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m[i * n + i] * m[i * n + i];
            for j in (i + 1)..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        if off <= 1e-34 * diag || off == 0.0 {
            break;
        }
        let threshold = if sweep < 3 { 0.2 * off.sqrt() / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// `det(I − A)` and `1 − det(I − A)` from the eigenvalues of `A`, the latter
/// free of cancellation when `det(I − A)` is close to one.
pub fn identity_minus_from_spectrum(eigenvalues: &[f64]) -> (f64, f64) {
    let log_det: f64 = eigenvalues.iter().map(|&l| (-l).ln_1p()).sum();
    (log_det.exp(), -log_det.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_determinants() {
        assert_eq!(lu_determinant(2, &[1.0, 2.0, 3.0, 4.0]), -2.0);
        assert_eq!(lu_determinant(2, &[0.0, 1.0, 1.0, 0.0]), -1.0);
        assert_eq!(lu_determinant(2, &[1.0, 2.0, 2.0, 4.0]), 0.0);
    }

    #[test]
    fn tiny_survival_keeps_relative_accuracy() {
        let (det, survival) = identity_minus_from_spectrum(&[1e-15, 3e-17]);
        assert!((det - (1.0 - 1.03e-15)).abs() < 2e-16);
        assert!((survival - 1.03e-15).abs() < 1e-28);
    }

    proptest! {
        #[test]
        fn spectrum_matches_determinant(entries in prop::collection::vec(-1.0f64..1.0, 36)) {
            let n = 6;
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] = 0.5 * (entries[i * n + j] + entries[j * n + i]);
                }
            }
            let eig = symmetric_eigenvalues(n, &a);
            let prod: f64 = eig.iter().product();
            let det = lu_determinant(n, &a);
            prop_assert!((prod - det).abs() < 1e-12);
            let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
            prop_assert!((eig.iter().sum::<f64>() - trace).abs() < 1e-12);
        }
    }
}
