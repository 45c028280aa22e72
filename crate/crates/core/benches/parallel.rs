//! Sequential against rayon on the two data-parallel workloads: independent
//! simulated paths and a sweep of independent determinants.
//!
//! Build with `--no-default-features` to confirm the fallback: every
//! strategy then runs sequentially and the groups time the same code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gue_minors::fredholm::{single_line_cdf, GridParams};
use gue_minors::sim::{sample_paths, PathEngine};
use gue_minors::Parallelism;

fn strategies() -> [(&'static str, Parallelism); 2] {
    [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Auto)]
}

fn paths(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_paths");
    g.sample_size(10);
    for (name, par) in strategies() {
        g.bench_function(BenchmarkId::new(name, "16x128"), |b| {
            b.iter(|| sample_paths(black_box(7), 0, 16, 128, PathEngine::SpectralChain, par).unwrap())
        });
    }
    g.finish();
}

fn fredholm_sweep(c: &mut Criterion) {
    let t: Vec<f64> = (0..8).map(|k| -2.0 + 0.5 * f64::from(k)).collect();
    let mut g = c.benchmark_group("cdf_sweep");
    g.sample_size(10);
    for (name, par) in strategies() {
        let mut p = GridParams::with_order(32);
        p.refine = false;
        g.bench_function(BenchmarkId::new(name, "u64_8pts"), |b| {
            b.iter(|| {
                par.map(&t, |&x| single_line_cdf(64, x, &p))
                    .into_iter()
                    .collect::<Result<Vec<_>, _>>()
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, paths, fredholm_sweep);
criterion_main!(benches);
