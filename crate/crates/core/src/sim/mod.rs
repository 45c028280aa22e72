//! Monte-Carlo simulation of the largest eigenvalue along the minors of one
//! Hermitian Gaussian array.

pub mod array;
pub mod chain;
pub mod dense;
pub mod io;
pub mod path;
pub mod rng;
pub mod stats;

pub use array::{sample_array, GaussianMinorArray};
pub use path::{
    chain_path, eigen_path, event_threshold, largest_eigenvalues_at, running_extremes, sample_path, sample_paths,
    sparse_subsequence, subsequence_events, EigenPath, EventTable, PathEngine, PathStatistics, Tail,
};
pub use stats::{empirical_cdf, ks_distance, ks_two_sample, Estimate};
