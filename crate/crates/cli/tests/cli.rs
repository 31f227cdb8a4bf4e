use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn tttoda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tttoda")).args(args).env_remove("THREADS").output().expect("binary runs")
}

fn schema_path(command: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(format!("{command}.json"))
}

/// Runs a subcommand, checks exit 0, and validates stdout against its schema.
fn json_ok(args: &[&str]) -> Value {
    let out = tttoda(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["version"], "v1");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(args[0])).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{}: {e}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{args:?} violates schema: {errors:#?}");
    v
}

fn code(args: &[&str]) -> Option<i32> {
    tttoda(args).status.code()
}

#[test]
fn classify_origin() {
    let v = json_ok(&["classify", "--case", "4a", "--s1", "0", "--s2", "0"]);
    assert_eq!(v["in_a"], true);
    assert_eq!(v["in_b"], true);
}

#[test]
fn classify_outside() {
    let v = json_ok(&["classify", "--case", "6a", "--s1", "0", "--s2", "5"]);
    assert_eq!(v["in_a"], false);
}

#[test]
fn integer_points_4a() {
    let v = json_ok(&["integer-points", "--case", "4a"]);
    assert_eq!(v["count"], 19);
    let points = v["points"].as_array().unwrap();
    assert!(points.iter().all(|p| p["reconstructs"] == true && p["factorization"].as_str().unwrap().contains("Phi")));
    let sliver: Vec<(i64, i64)> = v["inequality_only"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["s1"].as_i64().unwrap(), p["s2"].as_i64().unwrap()))
        .collect();
    assert_eq!(sliver, vec![(-5, -8), (5, -8)]);
}

#[test]
fn integer_points_csv() {
    let out = tttoda(&["integer-points", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s1,s2,factorization"));
    assert_eq!(lines.count(), 19);
}

#[test]
fn map_gamma_round_trip() {
    let v = json_ok(&["map-gamma", "--gamma0", "1", "--gamma1", "-1"]);
    assert!(v["s1"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["s2"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    let back = json_ok(&["map-gamma", "--inverse", "--s1", "0.3", "--s2", "-0.4"]);
    let again = json_ok(&[
        "map-gamma",
        "--gamma0",
        &back["gamma0"].to_string(),
        "--gamma1",
        &back["gamma1"].to_string(),
    ]);
    assert!((again["s1"].as_f64().unwrap() - 0.3).abs() < 1e-10);
    assert!((again["s2"].as_f64().unwrap() + 0.4).abs() < 1e-10);
}

#[test]
fn region_grid_json_and_csv() {
    let args = ["region-grid", "--s1-min", "-1", "--s1-max", "1", "--s2-min", "-1", "--s2-max", "1", "--step", "0.5"];
    let v = json_ok(&args);
    assert_eq!(v["count"], 25);
    let mut with_csv = args.to_vec();
    with_csv.push("--csv");
    let text = String::from_utf8(tttoda(&with_csv).stdout).unwrap();
    assert_eq!(text.lines().next(), Some("s1,s2,in_a,in_b"));
    assert_eq!(text.lines().count(), 26);
}

#[test]
fn solve_ode_completes() {
    let v = json_ok(&["solve-ode", "--gamma0", "0.5", "--gamma1", "-0.5"]);
    assert_eq!(v["termination"], "Completed");
    let g0 = v["fit"]["gammas"]["gamma0"].as_f64().unwrap();
    assert!((g0 - 0.5).abs() < 0.01, "{g0}");
}

#[test]
fn solve_ode_csv_header() {
    let text = String::from_utf8(tttoda(&["solve-ode", "--s1", "0.5", "--s2", "-0.5", "--csv"]).stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,w0,w1,dw0,dw1"));
}

#[test]
fn blow_up_is_a_domain_error() {
    let out = tttoda(&["solve-ode", "--s1", "0", "--s2", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blows up"));
    // the partial trajectory is still written
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["termination"]["BlowUp"]["x"].as_f64().unwrap() > 0.0);
}

#[test]
fn connection_check_interior() {
    let v = json_ok(&["connection-check", "--gamma0", "0.5", "--gamma1", "-0.5"]);
    assert_eq!(v["within_tolerance"], true);
}

#[test]
fn connection_check_boundary_example() {
    // (1, −1) sits on the edge of the domain, where the log fit converges slowly
    let v = json_ok(&["connection-check", "--gamma0", "1", "--gamma1", "-1"]);
    assert_eq!(v["margin"], 0.0);
    assert!(v["max_gamma_error"].as_f64().unwrap() < 0.25);
    assert!(v["sinh_gordon_error"].as_f64().unwrap() < 0.05);
}

#[test]
fn fredholm_small_grid() {
    let v = json_ok(&["fredholm", "--gamma0", "0.2", "--gamma1", "0.1", "--t", "1.5", "--nodes", "80"]);
    let r = &v["results"][0];
    let (q1, q2) = (r["q1"].as_f64().unwrap(), r["q2"].as_f64().unwrap());
    assert!((q1 + q2).abs() < 1e-8);
    assert_eq!(v["alpha"][1].as_f64().unwrap(), 2.1000000000000005);
}

#[test]
fn rh_y0_reports_flags() {
    let v = json_ok(&["rh-y0", "--s1", "0.5", "--s2", "-0.5", "--x", "3,5"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["symmetries"]["circulant"].as_f64().unwrap() < 1e-12));
}

#[test]
fn solvable_from_point_and_grid() {
    assert_eq!(json_ok(&["solvable-from", "--s1", "0", "--s2", "0"])["threshold"], 0.0);
    let t = json_ok(&["solvable-from", "--s1", "2.5", "--s2", "-1"])["threshold"].as_f64().unwrap();
    assert!(t > 0.0 && t.is_finite());
    let v = json_ok(&["solvable-from", "--grid", "--s1-min", "-3", "--s1-max", "3", "--s2-min", "-3", "--s2-max", "3", "--step", "1.5"]);
    assert_eq!(v["count"], 25);
}

#[test]
fn verify_identities_is_deterministic() {
    let a = json_ok(&["verify-identities", "--draws", "5", "--seed", "7"]);
    let b = json_ok(&["verify-identities", "--draws", "5", "--seed", "7"]);
    assert_eq!(a, b);
    assert_eq!(a["passed"], true);
    assert_eq!(a["det_e1"], -1.0 / 256.0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = tttoda(&["integer-points", "--csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("s1,s2,factorization"));
}

#[test]
fn threads_flag_and_env() {
    assert_eq!(code(&["--threads", "2", "classify", "--s1", "0", "--s2", "0"]), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_tttoda"))
        .args(["region-grid", "--step", "1"])
        .env("THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(code(&["--threads", "0", "classify", "--s1", "0", "--s2", "0"]), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&["classify", "--s1", "0"]), Some(2));
    assert_eq!(code(&["classify", "--s1", "0", "--s2", "0", "--bogus"]), Some(2));
    assert_eq!(code(&["classify", "--case", "7a", "--s1", "0", "--s2", "0"]), Some(2));
    assert_eq!(code(&["classify", "--s1", "0", "--s2", "0", "--csv"]), Some(2));
    assert_eq!(code(&["solve-ode"]), Some(2));
    assert_eq!(code(&["solve-ode", "--s1", "0", "--s2", "0", "--gamma0", "0", "--gamma1", "0"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["region-grid", "--step", "-1"]), Some(2));
}

#[test]
fn domain_errors_exit_1() {
    assert_eq!(code(&["map-gamma", "--gamma0", "5", "--gamma1", "0"]), Some(1));
    assert_eq!(code(&["map-gamma", "--inverse", "--s1", "0", "--s2", "5"]), Some(1));
    assert_eq!(code(&["fredholm", "--s1", "0.1", "--s2", "0", "--t", "1e-4"]), Some(1));
    assert_eq!(code(&["solve-ode", "--s1", "0.1", "--s2", "0", "--x-start", "1"]), Some(1));
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["fredholm", "--help"]), Some(0));
}
