//! The Hermitian Gaussian array `Z_{i,j}`, materialized to a finite corner.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rng::GaussianStream;

/// Leading `size × size` corner of the array, lower triangle packed by rows.
///
/// Off-diagonal entries have independent real and imaginary parts of
/// variance `1/4`; diagonal entries are real with variance `1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMinorArray {
    pub size: usize,
    pub seed: u64,
    pub stream_id: u64,
    /// `Z_{i,j}` for `i ≥ j` (0-based) at `i(i+1)/2 + j`.
    pub entries: Vec<Complex64>,
}

/// Packed position of `(i, j)` with `i ≥ j`.
pub fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(i >= j);
    i * (i + 1) / 2 + j
}

fn entry_from_pair(diagonal: bool, (x, y): (f64, f64)) -> Complex64 {
    if diagonal {
        Complex64::new(x * std::f64::consts::FRAC_1_SQRT_2, 0.0)
    } else {
        Complex64::new(0.5 * x, 0.5 * y)
    }
}

/// Draws row `i` (0-based) of the lower triangle, `Z_{i,0..=i}`.
pub fn sample_row(stream: &mut GaussianStream, i: usize) -> Vec<Complex64> {
    stream.seek(packed_index(i, 0) as u64);
    (0..=i).map(|j| entry_from_pair(i == j, stream.next_pair())).collect()
}

/// The array corner of size `n_max` for `(seed, stream_id)`.
///
/// # Panics
/// If `n_max == 0`.
pub fn sample_array(seed: u64, stream_id: u64, n_max: usize) -> GaussianMinorArray {
    assert!(n_max >= 1, "array size must be positive");
    let mut a = GaussianMinorArray {
        size: 0,
        seed,
        stream_id,
        entries: Vec::new(),
    };
    a.extend_to(n_max);
    a
}

impl GaussianMinorArray {
    /// Grows the corner to `n`, drawing only the new rows.
    pub fn extend_to(&mut self, n: usize) {
        if n <= self.size {
            return;
        }
        let mut stream = GaussianStream::new(self.seed, self.stream_id);
        self.entries.reserve(packed_index(n, 0) - self.entries.len());
        for i in self.size..n {
            self.entries.extend(sample_row(&mut stream, i));
        }
        self.size = n;
    }

    /// `Z_{i,j}` for any `i, j < size`, using conjugate symmetry.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            self.entries[packed_index(i, j)]
        } else {
            self.entries[packed_index(j, i)].conj()
        }
    }

    /// Row `i` of the lower triangle.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[packed_index(i, 0)..=packed_index(i, i)]
    }

    /// The leading `n × n` minor as a dense row-major Hermitian matrix.
    pub fn minor(&self, n: usize) -> Vec<Complex64> {
        assert!(n <= self.size);
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let z = self.entries[packed_index(i, j)];
                m[i * n + j] = z;
                m[j * n + i] = z.conj();
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regeneration_is_bitwise_identical() {
        assert_eq!(sample_array(7, 0, 16), sample_array(7, 0, 16));
    }

    #[test]
    fn growth_matches_direct_sampling() {
        let mut a = sample_array(9, 4, 5);
        a.extend_to(12);
        assert_eq!(a, sample_array(9, 4, 12));
    }

    #[test]
    fn diagonal_is_real_and_minor_hermitian() {
        let a = sample_array(1, 2, 6);
        let m = a.minor(6);
        for i in 0..6 {
            assert_eq!(a.get(i, i).im, 0.0);
            for j in 0..6 {
                assert_eq!(m[i * 6 + j], m[j * 6 + i].conj());
            }
        }
    }
}
