//! Oracles shared by the integration targets.

/// Christoffel–Darboux form of the `n`-point GUE kernel with weight `e^{-x²}`,
/// in the same (non-symmetric) conjugation as the minor kernel at `u₁ = u₂`:
/// `e^{-x²} Σ_{k<n} H_k(x)H_k(y)/𝒩_k = e^{-x²} (H_n(x)H_{n-1}(y) − H_{n-1}(x)H_n(y)) / (2𝒩_{n-1}(x−y))`.
/// Evaluated with orthonormal functions to stay in range; off-diagonal only.
pub fn christoffel_darboux(n: usize, x: f64, y: f64) -> f64 {
    let h = |t: f64| {
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
        for j in 0..n - 1 {
            let next = t * (2.0 / (j as f64 + 1.0)).sqrt() * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        let next = t * (2.0 / n as f64).sqrt() * cur - ((n as f64 - 1.0) / n as f64).sqrt() * prev;
        (cur, next) // (h_{n-1}, h_n)
    };
    let (ax, bx) = h(x);
    let (ay, by) = h(y);
    assert!(x != y, "off-diagonal form only");
    let sym = (n as f64 / 2.0).sqrt() * (bx * ay - ax * by) / (x - y);
    sym * (-(x * x - y * y) / 2.0).exp()
}
