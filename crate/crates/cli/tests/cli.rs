use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &[&str] = &["--n-lat", "12", "--m-circle", "64", "--m-average", "64"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funklib")).args(args).env_remove("FUNKLIB_THREADS").output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(SMALL);
    v
}

fn grid_values(json: &str) -> Vec<f64> {
    let v: Value = serde_json::from_str(json).unwrap();
    v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

fn transform_to(dir: &Path, name: &str, f: &str) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap();
    ok(&with_small(&["transform", "--f", f, "--which", "funk", "--out", p]));
    format!("@{p}")
}

#[test]
fn funk_of_one_is_two_pi() {
    let v = grid_values(&ok(&with_small(&["transform", "--f", "const:1", "--which", "funk"])));
    assert!(v.iter().all(|x| (x - 2.0 * PI).abs() <= 1e-12));
}

#[test]
fn funk_kills_odd_harmonics() {
    let v = grid_values(&ok(&with_small(&["transform", "--f", "ylm:3,0", "--which", "funk"])));
    assert!(v.iter().all(|x| x.abs() <= 1e-9));
}

#[test]
fn funk_of_y20_matches_multiplier() {
    let text = ok(&with_small(&["transform", "--f", "ylm:2,0", "--which", "funk", "--format", "csv"]));
    let y20 = |z: f64| (5.0 / (16.0 * PI)).sqrt() * (3.0 * z * z - 1.0);
    for r in csv_rows(&text) {
        assert!((r[3] + PI * y20(r[2])).abs() <= 1e-8);
    }
}

#[test]
fn dual_of_odd_data_is_a_precondition_error() {
    assert_eq!(code(&with_small(&["transform", "--f", "ylm:1,1", "--which", "dual"])), 3);
}

#[test]
fn other_transforms_run() {
    for which in ["dual", "mean:0.3", "gen:0.5", "cosine:0.1"] {
        let v = grid_values(&ok(&with_small(&["transform", "--f", "const:1+ylm:2,0", "--which", which])));
        assert!(v.iter().all(|x| x.is_finite()), "{which}");
    }
    let v = grid_values(&ok(&with_small(&["transform", "--f", "const:1", "--which", "mean:0.3"])));
    assert!(v.iter().all(|x| (x - 1.0).abs() <= 1e-12));
}

#[test]
fn harmonic_inversion_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let g = transform_to(dir.path(), "one.json", "const:1");
    let v = grid_values(&ok(&with_small(&["invert", "--g", &g, "--method", "harmonic"])));
    assert!(v.iter().all(|x| (x - 1.0).abs() <= 1e-10));
}

#[test]
fn harmonic_inversion_relative_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = "const:1+ylm:2,0+0.5*ylm:4,2";
    let g = transform_to(dir.path(), "g.json", spec);
    let text = ok(&with_small(&["invert", "--g", &g, "--method", "harmonic", "--format", "csv"]));
    let y20 = |z: f64| (5.0 / (16.0 * PI)).sqrt() * (3.0 * z * z - 1.0);
    // Real Y_{4,2} with the orthonormal convention used throughout.
    let y42 = |x: f64, y: f64, z: f64| (45.0 / (16.0 * PI)).sqrt() * (x * x - y * y) * (7.0 * z * z - 1.0) / 2.0;
    let mut err = 0.0;
    let mut norm = 0.0;
    for r in csv_rows(&text) {
        let want = 1.0 + y20(r[2]) + 0.5 * y42(r[0], r[1], r[2]);
        err += (r[3] - want).powi(2);
        norm += want * want;
    }
    assert!((err / norm).sqrt() <= 1e-8, "{}", (err / norm).sqrt());
}

#[test]
fn harmonic_inversion_rejects_odd_data() {
    let odd = run(&with_small(&["invert", "--g", "const:1+ylm:3,1"]));
    assert_eq!(odd.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&odd.stderr).contains("even"));
}

#[test]
fn abel_inversion_recovers_point_value() {
    let dir = tempfile::tempdir().unwrap();
    let g = transform_to(dir.path(), "g.json", "const:1+0.3*ylm:4,0");
    let text = ok(&with_small(&["invert", "--g", &g, "--method", "abel", "--point", "1,0,0", "--n-t", "256"]));
    let reports: Value = serde_json::from_str(&text).unwrap();
    let r = &reports[0];
    let y40 = 3.0 / (16.0 * PI.sqrt()) * 3.0;
    let recovered = r["recovered_value"].as_f64().unwrap();
    assert!((recovered - (1.0 + 0.3 * y40)).abs() <= 1e-2, "{recovered}");
    assert!(r["converged"].as_bool().unwrap());
    assert_eq!(r["t_nodes"].as_array().unwrap().len(), r["lhs_profile"].as_array().unwrap().len());
}

#[test]
fn identity_table_for_constants_and_mixtures() {
    let text = ok(&with_small(&["verify-identity", "--f", "const:1"]));
    for r in csv_rows(&text) {
        assert!((r[1] - 2.0 * PI).abs() <= 1e-10 && (r[2] - 2.0 * PI).abs() <= 1e-10);
    }
    let text =
        ok(&with_small(&["verify-identity", "--f", "const:1+ylm:2,0", "--theta", "0.3,0.9", "--point", "0.6,0,0.8"]));
    assert_eq!(csv_rows(&text).len(), 2);
    assert!(csv_rows(&text).iter().all(|r| r[4] <= 1e-3));
}

#[test]
fn identity_gate_and_preconditions() {
    assert_eq!(code(&with_small(&["verify-identity", "--f", "ylm:3,0"])), 3);
    assert_eq!(code(&with_small(&["verify-identity", "--f", "const:1", "--theta", "2.0"])), 3);
    // A tiny quadrature makes the two sides disagree, which trips the gate.
    let coarse = ["verify-identity", "--f", "const:1+ylm:6,0", "--m-average", "4", "--n-t", "8", "--tol", "1e-12"];
    assert_eq!(code(&coarse), 1);
}

#[test]
fn convex_reports() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.json");
    let s = summary.to_str().unwrap();
    ok(&with_small(&["convex", "--body", "ball:1", "--report", "minkowski", "--summary", s]));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v["constant_width"], Value::Bool(true));
    assert_eq!(v["constant_circumference"], Value::Bool(true));

    let text = ok(&with_small(&["convex", "--body", "harmonic:const:1+0.05*ylm:3,0", "--summary", s]));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v["constant_width"], Value::Bool(true));
    assert_eq!(v["constant_circumference"], Value::Bool(true));
    assert!(csv_rows(&text).iter().all(|r| (r[4] - 2.0 * PI).abs() <= 1e-8));

    let text = ok(&with_small(&[
        "convex",
        "--body",
        "ellipsoid:1,1,2",
        "--report",
        "width",
        "--direction",
        "0,0,1",
        "--summary",
        s,
    ]));
    assert_eq!(csv_rows(&text)[0][3], 4.0);

    let text = ok(&with_small(&[
        "convex",
        "--body",
        "ellipsoid:1,1,2",
        "--report",
        "circumference",
        "--direction",
        "0,0,1",
        "--summary",
        s,
    ]));
    let r = &csv_rows(&text)[0];
    assert!((r[3] - 2.0 * PI).abs() <= 1e-8 && (r[3] - r[4]).abs() <= 1e-8);

    let v: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(v["report"], "circumference");
}

#[test]
fn convex_rejects_invalid_bodies() {
    assert_eq!(code(&with_small(&["convex", "--body", "harmonic:const:1+0.5*ylm:3,0"])), 3);
    assert_eq!(code(&with_small(&["convex", "--body", "ball:-1"])), 3);
    assert_eq!(code(&with_small(&["convex", "--body", "cube:1"])), 2);
}

#[test]
fn multiplier_table() {
    let text = ok(&with_small(&["multipliers", "--alpha", "0.2,0.1,0.05,0.01", "--degrees", "0,2"]));
    let rows = csv_rows(&text);
    assert!(rows.iter().filter(|r| r[1] == 0.0).all(|r| r[2] == 1.0));
    let deg2: Vec<f64> = rows.iter().filter(|r| r[1] == 2.0).map(|r| r[2]).collect();
    assert!(deg2.windows(2).all(|w| (w[1] + 0.5).abs() < (w[0] + 0.5).abs()));
    assert!((deg2[3] + 0.5).abs() <= 5e-2);
    assert_eq!(code(&["multipliers", "--degrees", "2,3"]), 3);
    assert_eq!(code(&["multipliers", "--alpha", "0"]), 3);
}

#[test]
fn io_and_parse_errors_exit_two() {
    assert_eq!(code(&["transform", "--f", "@/definitely/not/here.json"]), 2);
    assert_eq!(code(&["transform", "--f", "bogus:1"]), 2);
    assert_eq!(code(&["transform", "--f", "const:1", "--which", "radon"]), 2);
    assert_eq!(code(&["nonsense"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n_lat": 4, "n_lon": 8, "values": [1.0, 2.0]}"#).unwrap();
    assert_eq!(code(&["transform", "--f", &format!("@{}", bad.display())]), 2);
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&["transform", "--f", &format!("@{}", bad.display())]), 2);
    std::fs::write(&bad, r#"{"n_lat": 8, "typo": 1}"#).unwrap();
    assert_eq!(code(&["multipliers", "--config", bad.to_str().unwrap()]), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_funklib"))
        .args(["multipliers", "--degrees", "0"])
        .env("FUNKLIB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n_lat": 6, "format": "csv"}"#).unwrap();
    let text = ok(&["transform", "--f", "const:1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(csv_rows(&text).len(), 6 * 12);
    let text =
        ok(&["transform", "--f", "const:1", "--config", cfg.to_str().unwrap(), "--n-lat", "4", "--format", "json"]);
    assert_eq!(grid_values(&text).len(), 4 * 8);
    assert_eq!(code(&["transform", "--f", "const:1", "--n-lat", "4", "--bandlimit", "9"]), 3);
    assert_eq!(code(&["transform", "--f", "ylm:9,0", "--n-lat", "4"]), 3);
}

#[test]
fn grid_and_spectrum_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let spectrum = dir.path().join("s.json");
    std::fs::write(&spectrum, r#"[{"l": 0, "m": 0, "value": 3.5449077018110318}]"#).unwrap();
    let g = dir.path().join("g.json");
    let gs = g.to_str().unwrap();
    ok(&with_small(&["transform", "--f", &format!("@{}", spectrum.display()), "--which", "funk", "--out", gs]));
    let v = grid_values(&std::fs::read_to_string(&g).unwrap());
    assert!(v.iter().all(|x| (x - 2.0 * PI).abs() <= 1e-12));
    let again = ok(&["transform", "--f", &format!("@{gs}"), "--which", "cosine:0.5"]);
    assert_eq!(grid_values(&again).len(), v.len());
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = transform_to(dir.path(), "g.json", "const:1+0.3*ylm:4,0");
    let runs: [&[&str]; 4] = [
        &["transform", "--f", "const:1+ylm:2,1", "--which", "gen:0.4"],
        &["invert", "--g", &g, "--method", "abel", "--n-t", "128"],
        &["convex", "--body", "ellipsoid:1,1.2,1.5", "--report", "circumference"],
        &["verify-identity", "--f", "const:1+ylm:4,3"],
    ];
    for args in runs {
        let a = run(&with_small(args));
        let b = Command::new(env!("CARGO_BIN_EXE_funklib"))
            .args(with_small(args))
            .env("FUNKLIB_THREADS", "3")
            .output()
            .unwrap();
        assert!(a.status.success() && b.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
