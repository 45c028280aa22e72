//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the [`Parallelism::Rayon`] strategy runs on a
//! rayon pool; without it every strategy runs sequentially. Results are
//! returned in input order either way, so outputs never depend on the
//! strategy or on the worker count.

use serde::{Deserialize, Serialize};

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "GUE_MINORS_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    Sequential,
    /// Rayon pool with the given worker count; `0` means rayon's default.
    Rayon(usize),
    #[default]
    Auto,
}

impl Parallelism {
    /// `Rayon(n)` from the environment, else `Auto`.
    pub fn from_env() -> Self {
        match std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            Some(1) => Parallelism::Sequential,
            Some(n) => Parallelism::Rayon(n),
            None => Parallelism::Auto,
        }
    }

    pub fn from_workers(workers: usize) -> Self {
        if workers == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Rayon(workers)
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Parallelism::Sequential
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match self {
                Parallelism::Sequential => items.iter().map(f).collect(),
                Parallelism::Auto | Parallelism::Rayon(0) => items.par_iter().map(f).collect(),
                Parallelism::Rayon(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                    Err(_) => items.iter().map(f).collect(),
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }

    /// Maps `f` over `0..n`.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        let idx: Vec<usize> = (0..n).collect();
        self.map(&idx, |&i| f(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_in_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| x.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 7;
        let a = Parallelism::Sequential.map(&xs, f);
        let b = Parallelism::Rayon(3).map(&xs, f);
        let c = Parallelism::Auto.map(&xs, f);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn one_worker_is_sequential() {
        assert_eq!(Parallelism::from_workers(1), Parallelism::Sequential);
        assert!(!Parallelism::Sequential.is_parallel());
    }
}
