use std::fs;

use gue_minors_cli::{parse_grid, run_with_io, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let argv: Vec<String> = std::iter::once("gue-minors").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with_io(&argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

#[test]
fn cdf_prints_a_probability() {
    let r = run(&["cdf", "--n", "50", "--t", "0", "--order", "64"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = json(&r.stdout);
    let p = v["results"]["cdf"][0].as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert_eq!(v["config"]["order"], 64);
    // Run record on stderr echoes the same config.
    assert_eq!(json(&r.stderr)["config"], v["config"]);
}

#[test]
fn kernel_routes_agree() {
    let r = run(&["kernel", "--u1", "8", "--u2", "5", "--y1", "0.3", "--y2", "-0.2", "--method", "both"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = json(&r.stdout);
    let res = &v["results"];
    assert!(res["hermite"][0].is_f64() && res["contour"][0].is_f64());
    assert!(res["relative_difference"][0].as_f64().unwrap() <= 1e-6);
}

#[test]
fn kernel_contour_domain_is_a_usage_error() {
    let r = run(&["kernel", "--u1", "3", "--u2", "5", "--method", "contour"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.starts_with("error:"));
}

#[test]
fn simulate_writes_one_row_per_path_and_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("paths.csv");
    let cp = dir.path().join("paths.bin");
    let r = run(&[
        "simulate", "--nmax", "40", "--paths", "7", "--seed", "42", "--out", out.to_str().unwrap(),
        "--checkpoint", cp.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path_id,N,lambda_raw,lambda_scaled"));
    assert_eq!(lines.count(), 40 * 7);
    let loaded = gue_minors::sim::io::load_checkpoint(&cp).unwrap();
    assert_eq!(loaded.len(), 7);
    let record = json(&r.stdout);
    assert_eq!(record["config"]["seed"], 42);
    assert!(record["summary"]["events"].is_object());

    // Same seed, same file.
    let again = dir.path().join("again.csv");
    run(&["simulate", "--nmax", "40", "--paths", "7", "--seed", "42", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn simulate_at_selected_sizes() {
    let r = run(&["simulate", "--nmax", "32", "--paths", "3", "--at", "8:32:8", "--format", "csv"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let rows: Vec<&str> = r.stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 3 * 4);
    assert!(rows[0].starts_with("0,8,"));
    assert!(rows[3].starts_with("0,32,"));
}

#[test]
fn unknown_flags_and_commands_are_rejected() {
    assert_eq!(run(&["cdf", "--bogus", "1"]).code, EXIT_USAGE);
    assert_eq!(run(&["nonsense"]).code, EXIT_USAGE);
    assert_eq!(run(&[]).code, EXIT_USAGE);
    assert_eq!(run(&["kernel", "--method", "guess"]).code, EXIT_USAGE);
}

/// Each `--flag` line of a help text joined with its continuation lines.
fn flag_blocks(help: &str) -> Vec<String> {
    let mut blocks: Vec<String> = Vec::new();
    for line in help.lines() {
        let t = line.trim_start();
        if t.starts_with("--") {
            blocks.push(t.to_owned());
        } else if t.starts_with('-') || t.is_empty() {
            blocks.push(String::new());
        } else if let Some(b) = blocks.last_mut() {
            b.push(' ');
            b.push_str(t);
        }
    }
    blocks.retain(|b| b.starts_with("--"));
    blocks
}

#[test]
fn help_lists_every_flag_with_default() {
    let r = run(&["simulate", "--help"]);
    assert_eq!(r.code, EXIT_OK);
    for flag in [
        "--nmax", "--paths", "--first-stream", "--engine", "--at", "--checkpoint", "--alpha", "--c", "--tail", "--seed",
        "--order", "--fine-order", "--workers", "--out", "--format", "--config",
    ] {
        let block = flag_blocks(&r.stdout)
            .into_iter()
            .find(|b| b.trim_start().starts_with(&format!("{flag} ")))
            .unwrap_or_else(|| panic!("{flag} missing from help"));
        assert!(block.contains("[default:"), "{block}");
    }
    assert!(r.stdout.contains("GUE_MINORS_WORKERS"));
    for cmd in ["cdf", "joint", "tw", "kernel", "decorrelate", "correlate", "tails", "experiment"] {
        let h = run(&[cmd, "--help"]);
        assert_eq!(h.code, EXIT_OK);
        for block in flag_blocks(&h.stdout) {
            assert!(block.contains("[default:"), "{cmd}: {block}");
        }
    }
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"n": 20, "order": 24, "t": "-1,0"}"#).unwrap();
    let r = run(&["cdf", "--config", cfg.to_str().unwrap(), "--n", "30"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let c = &json(&r.stdout)["config"];
    assert_eq!(c["n"], 30);
    assert_eq!(c["order"], 24);
    assert_eq!(c["t"], "-1,0");
    assert_eq!(c["seed"], 20_240_601);

    fs::write(&cfg, r#"{"nope": 1}"#).unwrap();
    let bad = run(&["cdf", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.code, EXIT_USAGE);
    assert!(bad.stderr.contains("nope"));

    let missing = run(&["cdf", "--config", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.code, EXIT_USAGE);
}

#[test]
fn workers_env_sets_the_default() {
    // The env fallback is read at parse time; a typed flag wins over it.
    std::env::set_var("GUE_MINORS_WORKERS", "3");
    let from_env = run(&["tw", "--s", "0", "--order", "16"]);
    let typed = run(&["tw", "--s", "0", "--order", "16", "--workers", "1"]);
    std::env::remove_var("GUE_MINORS_WORKERS");
    assert_eq!(json(&from_env.stdout)["config"]["workers"], 3);
    assert_eq!(json(&typed.stdout)["config"]["workers"], 1);
    assert_eq!(
        json(&from_env.stdout)["results"]["cdf"],
        json(&typed.stdout)["results"]["cdf"]
    );
}

#[test]
fn ranges_parse_inclusively() {
    assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(parse_grid("-2,3.5").unwrap(), vec![-2.0, 3.5]);
    assert_eq!(parse_grid("7").unwrap(), vec![7.0]);
    assert!(parse_grid("1:0:1").is_err());
    assert!(parse_grid("0:1:0").is_err());
    assert!(parse_grid("a,b").is_err());
    let r = run(&["tw", "--s", "5:1:1"]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn non_convergence_exits_two() {
    // A two-node grid cannot agree with its refinement at the bulk.
    let r = run(&["cdf", "--n", "50", "--t", "-1", "--order", "2", "--fine-order", "3"]);
    assert_eq!(r.code, EXIT_NUMERICAL, "{}", r.stderr);
}

#[test]
fn joint_reports_marginals_and_coupling_terms() {
    let r = run(&["joint", "--u1", "10", "--t1", "0", "--u2", "14", "--t2", "0.5", "--order", "24"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let res = &json(&r.stdout)["results"];
    let j = res["joint"][0].as_f64().unwrap();
    let m1 = res["marginal1"][0].as_f64().unwrap();
    let m2 = res["marginal2"][0].as_f64().unwrap();
    assert!(j <= m1.min(m2) + 1e-9);
    assert!(res["e"][0].is_f64() && res["f"][0].is_f64());
    let d = run(&["joint", "--u1", "10", "--u2", "14", "--t2", "0.5", "--coupling", "decorrelated", "--order", "24"]);
    let dj = json(&d.stdout)["results"]["joint"][0].as_f64().unwrap();
    assert!((dj - m1 * m2).abs() < 1e-9);
}

#[test]
fn sweep_commands_emit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let r = run(&[
        "decorrelate", "--u2", "10", "--sep", "10,30,90", "--order", "16", "--fine-order", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let report = json(&fs::read_to_string(&out).unwrap());
    assert_eq!(report["experiment"], "decorrelation_sweep");
    assert_eq!(report["config"]["orders"], serde_json::json!([16]));
    assert!(report["verdicts"]["monotone"].is_object());
    assert_eq!(json(&r.stdout)["config"]["u2"], 10);

    let c = run(&["correlate", "--u", "20", "--du", "3,5", "--order", "16", "--fine-order", "1", "--format", "csv"]);
    assert_eq!(c.code, EXIT_OK, "{}", c.stderr);
    assert!(c.stdout.lines().next().unwrap().split(',').any(|h| h == "f"));

    let t = run(&["tails", "--side", "left", "--s", "3:4:0.25", "--order", "24"]);
    assert_eq!(t.code, EXIT_OK, "{}", t.stderr);
    assert_eq!(json(&t.stdout)["config"]["parameters"]["side"], "left");

    let bad = run(&["correlate", "--beta", "0.1", "--delta", "0.05"]);
    assert_eq!(bad.code, EXIT_USAGE);
}

#[test]
fn experiment_config_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e.json");
    fs::write(
        &cfg,
        r#"{"experiment": "tail_fit", "parameters": {"side": "left", "s": "3:4:0.25"}, "seed": 9, "orders": [24]}"#,
    )
    .unwrap();
    let r = run(&["experiment", "--config", cfg.to_str().unwrap(), "--param", "tolerance=0.5"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let rep = json(&r.stdout);
    assert_eq!(rep["config"]["seed"], 9);
    assert_eq!(rep["config"]["orders"], serde_json::json!([24]));
    assert_eq!(rep["config"]["parameters"]["tolerance"], 0.5);
    assert_eq!(rep["verdicts"]["exponent"]["status"], "pass");

    let typed = run(&["experiment", "--config", cfg.to_str().unwrap(), "--seed", "11", "--orders", "20"]);
    let rep = json(&typed.stdout);
    assert_eq!(rep["config"]["seed"], 11);
    assert_eq!(rep["config"]["orders"], serde_json::json!([20]));

    assert_eq!(run(&["experiment"]).code, EXIT_USAGE);
    assert_eq!(run(&["experiment", "--name", "tail_fit", "--param", "bogus=1"]).code, EXIT_USAGE);
    assert_eq!(run(&["experiment", "--name", "tail_fit", "--param", "novalue"]).code, EXIT_USAGE);
}
