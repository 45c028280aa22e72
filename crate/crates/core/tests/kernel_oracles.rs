use gue_minors::kernel::{
    airy_kernel, edge_stretch, kernel_contour_oracle, kernel_raw, kernel_scaled, unscale_y,
};
use rand::{Rng, SeedableRng};

mod common;
use common::christoffel_darboux;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn contour_oracle_matches_hermite_sum_at_reference_points() {
    let y40 = unscale_y(40, 0.0);
    for &(u1, y1, u2, y2) in &[(8, 0.3, 5, -0.2), (40, y40, 40, y40), (1, 0.0, 1, 0.0), (64, 11.0, 3, 2.0)] {
        let a = kernel_raw(u1, y1, u2, y2);
        let b = kernel_contour_oracle(u1, y1, u2, y2).unwrap();
        let r = (a.sub(b) / b).to_f64().abs();
        assert!(r < 1e-6, "({u1},{y1};{u2},{y2}): {a} vs {b}");
    }
}

#[test]
fn contour_oracle_matches_hermite_sum_at_random_points() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240611);
    for _ in 0..50 {
        let u1: u32 = rng.random_range(1..=64);
        let u2: u32 = rng.random_range(1..=u1);
        let y1 = unscale_y(u1, rng.random_range(-4.0..6.0));
        let y2 = unscale_y(u2, rng.random_range(-4.0..6.0));
        let a = kernel_raw(u1, y1, u2, y2);
        let b = kernel_contour_oracle(u1, y1, u2, y2).unwrap();
        let r = (a.sub(b) / b).to_f64().abs();
        assert!(r < 1e-6, "({u1},{y1};{u2},{y2}): {a} vs {b}");
    }
}

#[test]
fn diagonal_reduction_to_christoffel_darboux() {
    for &n in &[5u32, 20, 100] {
        for &(x, y) in &[(0.1, -0.4), (1.3, 0.2), (-2.0, 2.5), (0.05, 0.0)] {
            let edge = (2.0 * n as f64).sqrt();
            for s in [0.0, 0.5 * edge] {
                let (x, y) = (x + s, y + s);
                let k = kernel_raw(n, x, n, y).to_f64();
                let cd = christoffel_darboux(n as usize, x, y);
                assert!(rel(k, cd) < 1e-9, "n={n} ({x},{y}): {k} vs {cd}");
            }
        }
    }
}

#[test]
fn airy_limit_improves_with_u() {
    let pts = [0.0, 1.0, 2.0];
    let mut previous = f64::INFINITY;
    for &u in &[100u32, 400, 1600] {
        let mut sup: f64 = 0.0;
        for &a in &pts {
            for &b in &pts {
                let k = kernel_scaled(u, a, u, b) / edge_stretch(u);
                sup = sup.max((k - airy_kernel(a, b).unwrap()).abs());
            }
        }
        assert!(sup < previous, "u={u}: {sup} >= {previous}");
        previous = sup;
    }
    assert!(previous < 0.05, "{previous}");
}

#[test]
fn scaled_kernel_near_airy_at_moderate_u() {
    let k = kernel_scaled(400, 1.0, 400, 1.0) / edge_stretch(400);
    assert!((k - airy_kernel(1.0, 1.0).unwrap()).abs() < 0.15);
}
