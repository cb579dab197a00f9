use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cocycle-lab"));
    cmd.args(args).env_remove("COCYCLE_LAB_THREADS");
    if let Some(t) = threads {
        cmd.env("COCYCLE_LAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn without_wall_time(out: &Output) -> String {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_bunching() {
    let out = run(&["check", path(&data("builtin.toml"))], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "check");
    assert_eq!(r["schema_version"], 1);
    let b = &r["results"]["bunching"];
    assert_eq!(b["bunched"], false);
    assert_eq!(b["alpha"].as_f64(), Some(0.125));
    let margin = 4.0 * (-0.125f64).exp2();
    assert!((b["margin"].as_f64().unwrap() - margin).abs() < 1e-12);

    let out = run(&["check", path(&data("rotation.toml"))], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["bunching"]["bunched"], true);
}

#[test]
fn input_errors_exit_three() {
    let out = run(&["check", path(&data("bad_det.toml"))], None);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 10"), "{err}");
    assert!(out.stdout.is_empty());

    assert_eq!(run(&["check", "/nonexistent/spec.toml"], None).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(3));
    assert_eq!(run(&["lyapunov", path(&data("rotation.toml"))], None).status.code(), Some(3));
    assert_eq!(run(&["check", path(&data("rotation.toml"))], Some("0")).status.code(), Some(3));
    assert_eq!(run(&["counterexample", "--k0", "3"], None).status.code(), Some(3));
    assert_eq!(run(&["--help"], None).status.code(), Some(0));
}

#[test]
fn lyapunov_csv_matches_diagonal_oracle() {
    let csv_path = scratch("diag.csv");
    let out = run(
        &["lyapunov", path(&data("hyperbolic.toml")), "--max-period", "6", "--tau", "0.6", "--csv", path(&csv_path)],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("period,word,lambda_plus"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let period: usize = cols[0].parse().unwrap();
        let word = cols[1];
        assert_eq!(word.len(), period);
        // diag(2, 1/2) and diag(3, 1/3): the exponent is the mean log of the top entries
        let ones = word.bytes().filter(|&b| b == b'1').count() as f64;
        let oracle = ((period as f64 - ones) * 2f64.ln() + ones * 3f64.ln()) / period as f64;
        let got: f64 = cols[2].parse().unwrap();
        assert!((got - oracle).abs() < 1e-12, "{line}");
        rows += 1;
    }
    // primitive binary necklaces of length 1..=6
    assert_eq!(rows, 2 + 1 + 2 + 3 + 6 + 9);
    assert!(text.contains("1,0,0.69314718055994529\n"));
    assert_eq!(report(&out)["results"]["orbit_count"], rows);
}

#[test]
fn negative_verdicts_exit_two() {
    let rot = data("rotation.toml");
    let out = run(&["lyapunov", path(&rot), "--max-period", "4", "--tau", "0.1"], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["results"]["holds"], false);

    let out = run(&["certify", path(&rot)], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["results"]["status"], "falsified");

    let out = run(&["certify", path(&data("builtin.toml"))], None);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["results"]["status"], "falsified");
    let witness = &r["results"]["probes"][0]["witness"];
    assert!(witness["norm"].as_f64().unwrap() <= 1.0 + 1e-10);
}

#[test]
fn certify_hyperbolic_specs() {
    let out = run(&["certify", path(&data("hyperbolic.toml"))], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["status"], "certified");
    let tau = r["results"]["cone"]["certificate"]["tau"].as_f64().unwrap();
    assert!(tau > 0.0 && tau <= 2f64.ln() + 1e-9);

    let out = run(&["certify", path(&data("golden_window.toml"))], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["recoded"], true);
    assert_eq!(r["results"]["status"], "certified");
}

#[test]
fn transfer_on_rotation_closes_at_zero() {
    let out = run(&["transfer", path(&data("rotation.toml")), "--n0", "20", "--eps", "0.01"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["bound_holds"], true);
    assert_eq!(r["results"]["transfer"]["lambda_plus_p"].as_f64(), Some(0.0));

    let out = run(&["transfer", path(&data("builtin.toml")), "--n0", "20", "--eps", "0.01"], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not fiber-bunched"));
}

#[test]
fn counterexample_checks_pass() {
    for verify in ["not-uh", "cones"] {
        let out = run(&["counterexample", "--verify", verify], None);
        assert_eq!(out.status.code(), Some(0), "{verify}");
        let r = report(&out);
        assert_eq!(r["results"]["pass"], true);
        assert_eq!(r["results"]["k0"], 13);
        assert!(r["spec_digest"].is_null());
    }
}

#[test]
fn reports_are_reproducible() {
    let window = data("golden_window.toml");
    let builtin = data("builtin.toml");
    let runs: [&[&str]; 3] = [
        &["lyapunov", path(&window), "--sample", "200", "--trials", "6", "--seed", "11"],
        &["certify", path(&builtin)],
        &["counterexample", "--verify", "exponents", "--max-period", "10", "--samples", "40"],
    ];
    for args in runs {
        let a = run(args, Some("1"));
        let b = run(args, Some("3"));
        let c = run(args, None);
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(without_wall_time(&a), without_wall_time(&b), "{args:?}");
        assert_eq!(without_wall_time(&a), without_wall_time(&c), "{args:?}");
        assert!(report(&a)["wall_time_seconds"].is_f64());
    }
}

#[test]
fn output_flag_writes_file() {
    let target = scratch("check.json");
    let out = run(&["check", path(&data("hyperbolic.toml")), "-o", path(&target)], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let digest = r["spec_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.bytes().all(|b| b.is_ascii_hexdigit()));
}
