use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_slipline-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, file: &str, args: &[&str]) -> (i32, Vec<u8>) {
    let out = dir.join(file);
    let status = Command::new(BIN).args(args).arg("--out").arg(&out).status().expect("binary runs");
    (status.code().unwrap_or(-1), std::fs::read(&out).unwrap_or_default())
}

fn csv(bytes: &[u8]) -> (String, Vec<Vec<f64>>) {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().to_string();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn sample_prandtl_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let (code, bytes) = run_to(
        dir.path(),
        "prandtl.csv",
        &["sample", "--solution", "prandtl", "--region", "-2,2,-0.99,0.99", "--n", "100"],
    );
    assert_eq!(code, 0);
    let (header, rows) = csv(&bytes);
    assert_eq!(header, "x,y,sigma,theta,sigma_x,sigma_y,tau_xy,xi,eta");
    assert_eq!(rows.len(), 10_000);
    for r in &rows {
        let (sx, sy, t) = (r[4], r[5], r[6]);
        assert!(((sx - sy).powi(2) + 4.0 * t * t - 1.0).abs() < 1e-12);
    }
}

#[test]
fn shear_on_the_plate_equals_k() {
    let dir = tempfile::tempdir().unwrap();
    let (code, bytes) = run_to(
        dir.path(),
        "plate.csv",
        &["sample", "--solution", "prandtl", "--region", "-2,2,-1,1", "--n", "21", "--k", "0.75"],
    );
    assert_eq!(code, 0);
    let (_, rows) = csv(&bytes);
    let top: Vec<&Vec<f64>> = rows.iter().filter(|r| r[1] == 1.0).collect();
    assert_eq!(top.len(), 21);
    assert!(top.iter().all(|r| (r[6] - 0.75).abs() < 1e-12));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["sliplines", "--solution", "nadai_two_circles", "--n", "6"],
        &["sliplines", "--solution", "spiral", "--n", "4", "--format", "svg"],
        &["envelope", "--solution", "spiral", "--format", "json"],
        &["streamlines", "--solution", "nadai", "--n", "4"],
        &["velocity", "--solution", "yakhno", "--params", r#"{"C1":3,"C2":3.141592653589793}"#, "--n", "12"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (c1, a) = run_to(dir.path(), &format!("a{i}"), args);
        let (c2, b) = run_to(dir.path(), &format!("b{i}"), args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert!(!a.is_empty() && a == b, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["sample", "--solution", "nadai_vortex", "--n", "40"];
    let one = Command::new(BIN).args(args).env("SLIPLINE_LAB_THREADS", "1").output().unwrap();
    let four = Command::new(BIN).args(args).env("SLIPLINE_LAB_THREADS", "4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn sliplines_csv_has_both_families() {
    let out = run(&["sliplines", "--solution", "prandtl", "--n", "3"]);
    assert!(out.status.success());
    let (header, rows) = csv(&out.stdout);
    assert!(header.starts_with("curve_id,s,x,y,"));
    assert!(rows.iter().any(|r| r[8] == 1.0) && rows.iter().any(|r| r[8] == 2.0));
    // Arc length increases along every curve.
    for w in rows.windows(2).filter(|w| w[0][0] == w[1][0]) {
        assert!(w[1][1] > w[0][1]);
    }
    let one = csv(&run(&["sliplines", "--solution", "prandtl", "--n", "3", "--family", "2"]).stdout).1;
    assert!(!one.is_empty() && one.iter().all(|r| r[8] == 2.0));
}

#[test]
fn two_circle_envelopes_are_the_walls() {
    let out = run(&["envelope", "--solution", "nadai_two_circles", "--params", r#"{"a":1,"b":2}"#]);
    assert!(out.status.success());
    let (header, rows) = csv(&out.stdout);
    assert_eq!(header, "curve_id,s,x,y,u,v,family");
    for r in rows {
        let radius = r[2].hypot(r[3]);
        let expected = if r[6] == 1.0 { 1.0 } else { 2.0 };
        assert!((radius - expected).abs() < 1e-12);
    }
}

#[test]
fn svg_overlays_envelopes() {
    let out = run(&["sliplines", "--solution", "nadai_two_circles", "--n", "4", "--format", "svg"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("viewBox"));
    for class in ["family-1", "family-2", "envelope"] {
        assert!(svg.contains(&format!(r#"class="{class}""#)), "{class}");
    }
}

#[test]
fn streamlines_report_dissipation() {
    let out = run(&["streamlines", "--solution", "nadai", "--n", "3", "--length", "0.5"]);
    assert!(out.status.success());
    let (header, rows) = csv(&out.stdout);
    assert_eq!(header, "curve_id,s,x,y,u,v,D,diss_ok");
    for r in rows {
        assert!((r[6] - 1.0 / (1.0 - r[3] * r[3]).sqrt()).abs() < 1e-8);
        assert_eq!(r[7], 1.0);
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["sample", "--solution", "no_such_field"]), Some(2));
    assert_eq!(code(&["sample", "--solution", "prandtl", "--params", "{"]), Some(2));
    assert_eq!(code(&["sample", "--solution", "prandtl", "--params", r#"{"m":3}"#]), Some(2));
    assert_eq!(code(&["sample", "--solution", "prandtl", "--region", "1,0,0,1"]), Some(2));
    assert_eq!(code(&["sample", "--solution", "prandtl", "--format", "svg"]), Some(2));
    assert_eq!(code(&["sliplines", "--solution", "prandtl", "--family", "3"]), Some(2));
    assert_eq!(code(&["velocity", "--solution", "prandtl"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(
        code(&["sample", "--solution", "nadai_two_circles", "--region", "5,6,0,1", "--polar"]),
        Some(3)
    );
    assert_eq!(code(&["envelope", "--solution", "nadai_channel", "--params", r#"{"c":0.5}"#]), Some(3));
    assert_eq!(code(&["verify", "--solution", "nadai_vortex"]), Some(0));
}

#[test]
fn verify_detects_an_injected_defect() {
    let out = run(&["verify", "--solution", "prandtl", "--perturb", "0.01"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FAIL residual: prandtl"), "{stderr}");
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], Value::Bool(false));
    for check in report["checks"].as_array().unwrap() {
        assert!(check["value"].is_number() && check["threshold"].is_number());
    }
}

#[test]
fn verify_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, bytes) = run_to(dir.path(), "report.json", &["verify", "--all"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));
    assert!(report["n_checks"].as_u64().unwrap() > 200);
}
