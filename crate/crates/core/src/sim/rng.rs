//! Counter-addressed Gaussian stream.
//!
//! Every array entry owns four 32-bit words of a ChaCha20 keystream, keyed by
//! the seed and selected by the stream id, so entry `k` can be produced
//! without generating entries `0..k`.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Keystream words consumed per entry.
const WORDS_PER_ENTRY: u128 = 4;

/// Standard normal pairs addressed by entry index.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha20Rng,
}

impl GaussianStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream_id);
        Self { rng }
    }

    /// Positions the stream at `entry`.
    pub fn seek(&mut self, entry: u64) {
        self.rng.set_word_pos(u128::from(entry) * WORDS_PER_ENTRY);
    }

    /// Two independent standard normals by Box–Muller; advances one entry.
    pub fn next_pair(&mut self) -> (f64, f64) {
        // (0, 1] keeps the logarithm finite.
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * f64::EPSILON / 2.0;
        let u2 = (self.rng.next_u64() >> 11) as f64 * f64::EPSILON / 2.0;
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    /// The pair at `entry`.
    pub fn pair_at(&mut self, entry: u64) -> (f64, f64) {
        self.seek(entry);
        self.next_pair()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let mut a = GaussianStream::new(11, 3);
        let seq: Vec<_> = (0..50).map(|_| a.next_pair()).collect();
        let mut b = GaussianStream::new(11, 3);
        for k in [49u64, 0, 17, 33, 1] {
            assert_eq!(b.pair_at(k), seq[k as usize]);
        }
    }

    #[test]
    fn streams_and_seeds_differ() {
        let p = GaussianStream::new(1, 0).pair_at(0);
        assert_ne!(p, GaussianStream::new(1, 1).pair_at(0));
        assert_ne!(p, GaussianStream::new(2, 0).pair_at(0));
    }

    #[test]
    fn moments_are_standard() {
        let mut g = GaussianStream::new(5, 0);
        let n = 100_000;
        let (mut s1, mut s2, mut cross) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let (x, y) = g.next_pair();
            s1 += x + y;
            s2 += x * x + y * y;
            cross += x * y;
        }
        let m = 2.0 * n as f64;
        assert!((s1 / m).abs() < 3.0 / m.sqrt() * 1.5);
        assert!((s2 / m - 1.0).abs() < 3.0 * (2.0 / m).sqrt() * 1.5);
        assert!((cross / n as f64).abs() < 4.0 / (n as f64).sqrt());
    }
}
