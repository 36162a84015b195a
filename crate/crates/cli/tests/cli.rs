//! End-to-end tests against the built binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracops"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

/// Last `t,value` row of a CSV body.
fn last_value(csv: &str) -> f64 {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .filter_map(|l| l.split_once(','))
        .map(|(_, v)| v.parse::<f64>().unwrap())
        .next_back()
        .expect("csv has data rows")
}

#[test]
fn deriv_gl_matches_power_rule() {
    let out = fracops(&[
        "deriv", "--method", "gl", "--alpha", "0.5", "--f", "t^2", "--t1", "1", "--n",
        "1001",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = last_value(&stdout(&out));
    assert!((v - 1.504_505_556_146_928_6).abs() < 1e-2, "value at t=1: {v}");
}

#[test]
fn deriv_ell1_emits_delta_prologue() {
    let out = fracops(&["deriv", "--method", "ell1", "--f", "exp(2*t)", "--t1", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# delta,0,0,1\n# delta,0,1,-1\n"), "{}", &text[..60]);
}

#[test]
fn ml_prints_twelve_significant_digits() {
    let out = fracops(&["ml", "--beta", "1", "--gamma", "1", "--z", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.trim(), "2.71828182846e0");
}

#[test]
fn invlap_both_methods() {
    let talbot = fracops(&["invlap", "--F", "1/s", "--method", "talbot", "--t", "5"]);
    assert!(talbot.status.success());
    let v: f64 = stdout(&talbot).trim().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-6);

    let stehfest =
        fracops(&["invlap", "--F", "1/(s+1)", "--method", "stehfest", "--t", "1"]);
    assert!(stehfest.status.success());
    let v: f64 = stdout(&stehfest).trim().parse().unwrap();
    assert!((v - (-1.0f64).exp()).abs() < 1e-6, "{v}");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = fracops(&[
            "deriv", "--method", "rl", "--alpha", "0.5", "--f", "t^2", "--t1", "2",
            "--n", "513", "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn non_monotone_csv_is_rejected_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t,value\n0,1\n0.5,2\n0.25,3\n").unwrap();
    let out = fracops(&[
        "deriv", "--method", "gl", "--alpha", "0.5", "--input", bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("strictly increasing"), "{}", stderr(&out));
}

#[test]
fn sampled_input_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sig.csv");
    let mut body = String::from("t,value\n");
    for k in 0..=200 {
        let t = k as f64 / 100.0;
        body.push_str(&format!("{t},{}\n", t * t));
    }
    fs::write(&input, body).unwrap();
    let out = fracops(&[
        "deriv", "--method", "caputo", "--alpha", "0.5", "--input",
        input.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = last_value(&stdout(&out));
    // Caputo of t² at t = 2 is Γ(3)/Γ(2.5)·2^{1.5}
    let want = 1.504_505_556_146_928_6 * 2.0f64.powf(1.5);
    assert!((v - want).abs() / want < 2e-2, "{v} vs {want}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fracops(&["deriv"]).status.code(), Some(2)); // no signal at all
    assert_eq!(
        fracops(&["deriv", "--method", "nope", "--f", "t", "--alpha", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(fracops(&["validate", "nonsense"]).status.code(), Some(2));
    assert_eq!(fracops(&["--definitely-not-a-flag"]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_one() {
    // negative base with fractional exponent fails at evaluation time
    let out = fracops(&[
        "deriv", "--method", "gl", "--alpha", "0.5", "--f", "(t-2)^0.5", "--t1", "1",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn validate_suite_passes_and_prints_table() {
    let out = fracops(&["validate", "gl-vs-rl"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS"));
    assert!(text.contains("summary:"));
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fracops.conf");
    fs::write(&cfg, "beta = 1\ngamma = 1\nz = 0\n").unwrap();

    // all three picked up from the file: E_{1,1}(0) = 1
    let from_file = fracops(&["ml", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    assert_eq!(stdout(&from_file).trim(), "1.00000000000e0");

    // explicit flag beats the file entry
    let flag_wins = fracops(&["ml", "--config", cfg.to_str().unwrap(), "--z", "1"]);
    assert_eq!(stdout(&flag_wins).trim(), "2.71828182846e0");
}

#[test]
fn optimize_writes_deterministic_trace() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("trace_a.csv");
    let b = dir.path().join("trace_b.csv");
    for path in [&a, &b] {
        let out = fracops(&[
            "optimize", "--alpha", "0.8", "--lambda", "0.1", "--dim", "2", "--iters",
            "25", "--seed", "7", "--tolerance", "0", "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text_a = fs::read_to_string(&a).unwrap();
    assert_eq!(text_a, fs::read_to_string(&b).unwrap());
    assert!(text_a.starts_with("iter,x0,x1,objective\n"));

    // classical order runs the full budget (monotone objective, zero tol)
    let full = dir.path().join("classical.csv");
    let out = fracops(&[
        "optimize", "--alpha", "1.0", "--dim", "2", "--iters", "25", "--seed", "7",
        "--tolerance", "0", "--out", full.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&full).unwrap();
    assert_eq!(text.lines().count(), 27); // header + initial point + 25 iterations
}

#[test]
fn thread_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_fracops"))
        .env("FRACOP_THREADS", "1")
        .args(["deriv", "--method", "gl", "--alpha", "0.5", "--f", "t", "--n", "64"])
        .output()
        .unwrap();
    assert!(out.status.success());

    let bad = Command::new(env!("CARGO_BIN_EXE_fracops"))
        .env("FRACOP_THREADS", "zero")
        .args(["ml", "--beta", "1", "--gamma", "1", "--z", "0"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn deriv_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = fracops(&[
        "deriv", "--method", "laplace", "--alpha", "0.5", "--f", "t", "--n", "65",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(Path::new(&path).exists());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("t,value"));
}
