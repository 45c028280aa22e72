use gue_minors::experiments::*;
use gue_minors::fredholm::GridParams;
use gue_minors::special::normal_sf;
use gue_minors::{Error, Parallelism};

fn quick() -> GridParams {
    GridParams::with_order(48).without_refinement()
}

#[test]
fn synthetic_exponential_tail() {
    let s: Vec<f64> = (0..10).map(|k| 1.0 + 0.5 * f64::from(k)).collect();
    let y: Vec<f64> = s.iter().map(|v| (-2.0 * v).exp().ln()).collect();
    let f = fit_power(&s, &y, 1.0).unwrap();
    assert!((f.slope + 2.0).abs() < 1e-6);
}

#[test]
fn trace_sandwich_in_scan() {
    let scan = tail_bound_scan(256, &[3.0], (2.0, 5.0), (2.0, 5.0), &GridParams::default()).unwrap();
    let b = scan.trace[0].unwrap();
    assert!(b.lower <= scan.p_right[0] + 1e-8 && scan.p_right[0] <= b.upper + 1e-8);
    assert!(scan.right_fit.is_none());
}

#[test]
fn left_tail_decreasing_at_small_u() {
    let t: Vec<f64> = (0..=8).map(|k| 0.5 * f64::from(k)).collect();
    let scan = tail_bound_scan(64, &t, (2.0, 4.0), (2.0, 4.0), &quick()).unwrap();
    let at2 = scan.p_left[4];
    assert!(at2 > 0.0 && at2 < 1.0);
    assert!(scan.p_left.windows(2).all(|w| w[1] <= w[0]));
    assert!(scan.left_fit.unwrap().slope < 0.0);
}

#[test]
fn equal_lines_rejected_by_decorrelation_sweep() {
    assert!(matches!(
        decorrelation_sweep(60, &[0], 0.0, 0.0, &quick()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn decorrelation_shape_on_a_short_sweep() {
    let s = decorrelation_sweep(20, &[30, 60, 120], 0.5, 0.5, &quick()).unwrap();
    assert!(s.e.iter().all(|&e| e >= 0.0));
    assert!(s.e.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    if let Some(c) = s.prefactor {
        assert!(c > 0.0);
    }
}

#[test]
fn normal_term_vanishes_for_large_arguments() {
    assert!(normal_sf(40.0) < 1e-15);
    let s = correlation_sweep(512, &[4], 1.0, 0.0, 1.0, 0.04, 0.05, &quick()).unwrap();
    // 512^{1/3}/√4 = 4.
    assert!((s.normal_term[0] - normal_sf(4.0)).abs() < 1e-18);
    assert!(s.f[0] >= 0.0);
}

#[test]
fn correlation_window_checked() {
    assert!(correlation_sweep(40, &[8], 1.0, 1.0, 0.5, 0.04, 0.05, &quick()).is_err());
    assert!(correlation_sweep(40, &[8], 1.0, 1.0, 0.0, 0.06, 0.05, &quick()).is_err());
}

#[test]
fn single_entry_line_is_symmetric() {
    let p = GridParams::default();
    // Scaled t = −2 is the raw threshold 0 on the 1×1 line.
    let cmp = mc_vs_fredholm(1, &[-2.0], 100_000, 3, &p).unwrap();
    assert!((cmp.fredholm[0] - 0.5).abs() < 1e-9, "{}", cmp.fredholm[0]);
    assert!(cmp.z[0].abs() < 3.0, "{:?}", cmp.mc[0]);
    let again = mc_vs_fredholm(1, &[-2.0], 100_000, 3, &p).unwrap();
    assert_eq!(cmp.mc, again.mc);
    assert!(mc_vs_fredholm(1, &[0.0], 999, 3, &p).is_err());
}

#[test]
fn reports_replay_and_serialize_canonically() {
    let config = SweepConfig::new(ExperimentKind::TailFit).with("side", "left");
    let a = run(&config, Parallelism::Sequential).unwrap();
    assert_eq!(a.verdicts["exponent"].status, Status::Pass);
    // The resolved config reproduces the results exactly.
    let b = run(&a.config, Parallelism::Rayon(2)).unwrap();
    assert_eq!(a.results, b.results);
    assert_eq!(a.config, b.config);
    let json = a.to_json().unwrap();
    let back: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(canonical_json(&back).unwrap(), json);
    let csv = a.to_csv();
    assert_eq!(csv.lines().next().unwrap().split(',').count(), a.results.len());
}

#[test]
fn unknown_parameters_rejected() {
    let c = SweepConfig::new(ExperimentKind::McVsFredholm).with("samples", 10);
    assert!(matches!(run(&c, Parallelism::Sequential), Err(Error::Config(_))));
    let c = SweepConfig::new(ExperimentKind::TailFit).with("s", [3.0, 4.0]);
    assert!(matches!(run(&c, Parallelism::Sequential), Err(Error::Precondition(_))));
}

#[test]
fn emit_reports_unwritable_paths() {
    let c = SweepConfig::new(ExperimentKind::TailFit).with("side", "left");
    let r = run(&c, Parallelism::Sequential).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.json");
    r.emit(Format::Json, &f).unwrap();
    let first = std::fs::read(&f).unwrap();
    r.emit(Format::Json, &f).unwrap();
    assert_eq!(first, std::fs::read(&f).unwrap());
    let bad = dir.path().join("missing").join("r.csv");
    let err = r.emit(Format::Csv, &bad).unwrap_err();
    assert!(err.to_string().contains("missing"));
}
