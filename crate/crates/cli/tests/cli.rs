use std::process::{Command, Output};

use serde_json::Value;

fn stabgem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabgem"))
        .args(args)
        .env_remove("STABGEM_JOBS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn toric_patch_certificate_clears_the_constant() {
    let out = stabgem(&["gem", "certify", "--code", "toric", "--L", "40", "--t", "0"]);
    let v = json(&out);
    let r = &v["result"];
    assert!(r["m"].as_u64().unwrap() >= 32);
    assert!(r["alpha_effective"].as_f64().unwrap() >= 1.4e-4);
    assert_eq!(v["certificate"]["m"], r["m"]);
}

#[test]
fn honeycomb_exchange_is_fermionic() {
    let out = stabgem(&[
        "analyze",
        "exchange",
        "--code",
        "honeycomb",
        "--Lx",
        "4",
        "--Ly",
        "4",
        "--oracle-check",
    ]);
    let v = json(&out);
    assert_eq!(v["result"]["phase"].as_f64(), Some(-1.0));
    assert_eq!(v["result"]["oracle"]["agree"], Value::Bool(true));
}

#[test]
fn ghz_has_unit_measure() {
    let v = json(&stabgem(&["gem", "e0", "--code", "ghz", "--n", "8"]));
    assert_eq!(v["result"]["e0"].as_f64(), Some(1.0));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = stabgem(&["gem", "e0", "--code", "ghz", "--n", "4", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn missing_size_is_a_validation_error() {
    assert_eq!(
        stabgem(&["code", "info", "--code", "toric"]).status.code(),
        Some(2)
    );
}

#[test]
fn honeycomb_mesh_certificate_is_infeasible() {
    let out = stabgem(&[
        "gem",
        "theorem2",
        "--code",
        "honeycomb",
        "--Lx",
        "6",
        "--Ly",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn same_seed_gives_identical_reports() {
    let args = [
        "gem",
        "mixed-bound",
        "--code",
        "honeycomb",
        "--Lx",
        "4",
        "--Ly",
        "2",
        "--samples",
        "6",
        "--seed",
        "17",
    ];
    let a = stabgem(&args);
    let b = stabgem(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = stabgem(&[&args[..10], &["--seed", "18"]].concat());
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let args = [
        "oracle",
        "crosscheck",
        "--cases",
        "20",
        "--max-n",
        "6",
        "--format",
        "csv",
    ];
    let direct = stabgem(&args);
    let to_file = stabgem(&[&args[..], &["-o", path.to_str().unwrap()]].concat());
    assert!(to_file.status.success() && to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    assert!(String::from_utf8_lossy(&direct.stdout).starts_with("command,"));
}

#[test]
fn code_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toric3.json");
    let p = path.to_str().unwrap();
    assert!(
        stabgem(&["code", "build", "--code", "toric", "--L", "3", "-o", p])
            .status
            .success()
    );
    let v = json(&stabgem(&[
        "code",
        "check",
        "--file",
        p,
        "--verify-distance",
    ]));
    assert_eq!(v["result"]["n"], 18);
    assert_eq!(v["result"]["k"], 2);
    assert_eq!(v["result"]["d"], 3);

    std::fs::write(&path, "{\"version\": 1, \"n\": 2}").unwrap();
    assert_eq!(
        stabgem(&["code", "check", "--file", p]).status.code(),
        Some(2)
    );
}

#[test]
fn jobs_come_from_the_environment() {
    let run = |jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_stabgem"))
            .args(["gem", "certify", "--code", "toric", "--L", "12"])
            .env("STABGEM_JOBS", jobs)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn markdown_certificate_table() {
    let out = stabgem(&[
        "gem", "certify", "--code", "toric", "--L", "12", "--format", "md",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("| code | n | t | m |"));
}
