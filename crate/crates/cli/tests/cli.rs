use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dyadic(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadic"))
        .current_dir(dir)
        .env_remove("DYADIC_SEED")
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// A workspace with a flat weight, a cascade weight and a random symbol.
fn fixtures() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for args in [
        &["gen-weight", "--family", "power", "--alpha", "0", "--depth", "8", "--out", "flat.json"][..],
        &["gen-weight", "--family", "cascade", "--delta", "0.9", "--depth", "8", "--seed", "4", "--out", "cascade.json"],
        &["gen-symbol", "--kind", "random-normalized", "--depth", "8", "--seed", "2", "--out", "b.json"],
    ] {
        let o = dyadic(p, args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    dir
}

fn tightened_constants(dir: &Path, from: &str, to: &str) -> PathBuf {
    let frozen = include_str!("../../core/suite_constants.toml");
    assert!(frozen.contains(from));
    let path = dir.join("tight.toml");
    std::fs::write(&path, frozen.replace(from, to)).unwrap();
    path
}

#[test]
fn verify_bellman_b3_passes_with_nonnegative_slack() {
    let dir = tempfile::tempdir().unwrap();
    let o = dyadic(
        dir.path(),
        &["verify-bellman", "--function", "b3", "--samples", "10000", "--seed", "1", "--out", "cert.json"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = read_json(dir.path().join("cert.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["points"], 10000);
    for c in report["conditions"].as_array().unwrap() {
        if c["kind"] == "slack" {
            assert!(c["worst"].as_f64().unwrap() >= 0.0, "{c}");
        }
    }
}

#[test]
fn prop1_on_flat_weight_has_ratio_at_most_one() {
    let dir = fixtures();
    let o = dyadic(
        dir.path(),
        &["check", "--which", "prop1", "--weight", "flat.json", "--symbol", "b.json", "--out", "r.json"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let run = read_json(dir.path().join("r.json"));
    let report = &run["checks"][0]["report"];
    assert_eq!(report["id"], "prop1");
    assert!(report["ratio"].as_f64().unwrap() <= 1.0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("prop1"));
}

#[test]
fn scan_writes_three_records_with_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = dyadic(
        dir.path(),
        &["scan", "--family", "power", "--alphas", "0,0.5,0.8", "--depth", "10", "--seed", "1", "--out", "scan.csv"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("scan.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["param", "a2", "bmo", "norm", "ratio", "slope_so_far"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let last = rows.last().unwrap();
    assert!(last[5].parse::<f64>().unwrap().is_finite());
}

#[test]
fn every_check_passes_on_a_cascade() {
    let dir = fixtures();
    let o = dyadic(dir.path(), &["check", "--which", "all", "--weight", "cascade.json", "--symbol", "b.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn failing_check_exits_one_with_witness() {
    let dir = fixtures();
    let constants = tightened_constants(dir.path(), "wittwer = 16.0", "wittwer = 1e-6");
    let o = dyadic(
        dir.path(),
        &[
            "check", "--which", "wittwer,prop3", "--weight", "cascade.json",
            "--constants", constants.to_str().unwrap(), "--out", "r.json",
        ],
    );
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("check wittwer failed") && err.contains("witness"), "{err}");
    let run = read_json(dir.path().join("r.json"));
    assert_eq!(run["passed"], false);
    assert_eq!(run["checks"][1]["failures"], 0);
}

#[test]
fn failing_certificate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let constants = tightened_constants(dir.path(), "b3_midpoint_ratio = 0.25", "b3_midpoint_ratio = 0.3");
    let o = dyadic(
        dir.path(),
        &["verify-bellman", "--function", "b3", "--samples", "2000", "--constants", constants.to_str().unwrap()],
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("midpoint_ratio"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = fixtures();
    let bad_config = dir.path().join("bad.toml");
    std::fs::write(&bad_config, "depth = 6\nverbose = true\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec!["check", "--which", "prop1", "--weight", "flat.json", "--colour"],
        vec!["check", "--which", "prop9", "--weight", "flat.json"],
        vec!["check", "--which", "embed", "--weight", "flat.json"],
        vec!["check", "--which", "prop1", "--weight", "missing.json", "--symbol", "b.json"],
        vec!["gen-weight", "--family", "power", "--alpha", "0.5", "--depth", "17"],
        vec!["gen-weight", "--family", "power", "--alpha", "1.5", "--depth", "4"],
        vec!["gen-symbol", "--kind", "wavy", "--depth", "4"],
        vec!["verify-bellman", "--function", "b4"],
        vec!["verify-bellman", "--function", "b1", "--samples", "0"],
        vec!["gen-symbol", "--kind", "dyadic-log", "--config", bad_config.to_str().unwrap()],
        vec!["scan", "--alphas", "0.2", "--depth", "4", "--max-iterations", "0"],
    ];
    for args in cases {
        let o = dyadic(dir.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn depth_mismatch_is_a_usage_error() {
    let dir = fixtures();
    let o = dyadic(dir.path(), &["gen-symbol", "--kind", "dyadic-log", "--depth", "5", "--out", "b5.json"]);
    assert_eq!(code(&o), 0);
    let o = dyadic(dir.path(), &["norm", "--weight", "flat.json", "--symbol", "b5.json"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn convergence_failure_exits_three() {
    let dir = fixtures();
    let o = dyadic(dir.path(), &["norm", "--weight", "cascade.json", "--symbol", "b.json", "--max-iterations", "2"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("last estimate"));

    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[tolerances]\nnorm_max_iterations = 2\n").unwrap();
    let o = dyadic(dir.path(), &["scan", "--alphas", "0.3,0.6", "--depth", "6", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn norm_record_fields() {
    let dir = fixtures();
    let o = dyadic(dir.path(), &["norm", "--weight", "flat.json", "--symbol", "b.json", "--out", "n.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(dir.path().join("n.json"));
    for key in ["norm", "a2", "bmo", "ratio", "iterations"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert!((r["a2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = fixtures();
    let runs: [&[&str]; 4] = [
        &["check", "--which", "all", "--weight", "cascade.json", "--symbol", "b.json", "--out", "OUT"],
        &["scan", "--family", "cascade", "--deltas", "0.3,0.6,0.9", "--depth", "7", "--seed", "5", "--symbol", "random-normalized", "--out", "OUT"],
        &["verify-bellman", "--function", "b2", "--samples", "3000", "--seed", "8", "--out", "OUT"],
        &["norm", "--weight", "cascade.json", "--symbol", "b.json", "--out", "OUT"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut bodies = Vec::new();
        for rep in 0..2 {
            let name = format!("out{k}_{rep}");
            let args: Vec<&str> = args.iter().map(|a| if *a == "OUT" { name.as_str() } else { a }).collect();
            let o = dyadic(dir.path(), &args);
            assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
            bodies.push(std::fs::read(dir.path().join(&name)).unwrap());
        }
        assert_eq!(bodies[0], bodies[1], "run {k} differs");
    }
}

#[test]
fn seed_comes_from_environment_when_no_flag() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |seed_env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dyadic"));
        cmd.current_dir(dir.path()).env("RUST_LOG", "warn").env_remove("DYADIC_SEED");
        if let Some(s) = seed_env {
            cmd.env("DYADIC_SEED", s);
        }
        let o = cmd.args(["gen-symbol", "--kind", "random-normalized", "--depth", "5"]).args(extra).output().unwrap();
        assert!(o.status.success());
        o.stdout
    };
    let from_env = gen(Some("5"), &[]);
    assert_eq!(from_env, gen(None, &["--seed", "5"]));
    assert_ne!(from_env, gen(None, &["--seed", "6"]));
    assert_eq!(gen(Some("9"), &["--seed", "5"]), from_env);
}

#[test]
fn config_file_supplies_depth_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "depth = 3\nseed = 11\n").unwrap();
    let o = dyadic(dir.path(), &["gen-weight", "--family", "cascade", "--delta", "0.5", "--config", "run.toml"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let w: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(w["depth"], 3);
    assert_eq!(w["values"].as_array().unwrap().len(), 8);

    let again = dyadic(dir.path(), &["gen-weight", "--family", "cascade", "--delta", "0.5", "--depth", "3", "--seed", "11"]);
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn check_at_a_fixed_root() {
    let dir = fixtures();
    let o = dyadic(
        dir.path(),
        &["check", "--which", "prop3e", "--weight", "cascade.json", "--root", "2:1", "--out", "r.json"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let run = read_json(dir.path().join("r.json"));
    assert_eq!(run["checks"][0]["roots"], 1);
    assert_eq!(run["checks"][0]["report"]["root"]["level"], 2);
    assert_eq!(run["checks"][0]["report"]["root"]["position"], 1);

    let o = dyadic(dir.path(), &["check", "--which", "prop3e", "--weight", "cascade.json", "--root", "8:0"]);
    assert_eq!(code(&o), 2, "finest cells are not roots");
}

#[test]
fn carleson_b_needs_only_a_symbol() {
    let dir = fixtures();
    let o = dyadic(dir.path(), &["check", "--which", "carleson-b", "--symbol", "b.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}
