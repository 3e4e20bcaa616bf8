use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opjensen::io::{MatrixFile, MatrixKind};
use opjensen::linalg::{ComplexMatrix, HermitianMatrix};
use serde_json::Value;
use tempfile::TempDir;

fn opjensen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opjensen")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, m: &ComplexMatrix, kind: Option<MatrixKind>) -> PathBuf {
    let p = dir.path().join(name);
    MatrixFile::from_matrix(m, kind).save(&p).unwrap();
    p
}

fn herm(dir: &TempDir, name: &str, rows: &[&[f64]]) -> PathBuf {
    let h = HermitianMatrix::from_real_rows(rows).unwrap();
    write(dir, name, h.matrix(), Some(MatrixKind::Hermitian))
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_midpoint_then_verify() {
    let dir = TempDir::new().unwrap();
    let a = herm(&dir, "a.json", &[&[1.0, 0.0], &[0.0, -1.0]]);
    let b = herm(&dir, "b.json", &[&[0.0, 1.0], &[1.0, 0.0]]);
    let cert = dir.path().join("cert.json");
    let out = opjensen(&["construct", "midpoint", "-i", s(&a), "-i", s(&b), "--fn", "abs", "--out", s(&cert)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let v = json(&cert);
    assert!(v["certificate_margin"].as_f64().unwrap() >= -1e-8);
    assert_eq!(v["meta"]["theorem"], "cor23");
    let lx: Vec<f64> = serde_json::from_value(v["x_eigenvalues"].clone()).unwrap();
    let ly: Vec<f64> = serde_json::from_value(v["y_eigenvalues"].clone()).unwrap();
    assert!((lx[0] - 0.7071067811865476).abs() < 1e-12);
    assert!((ly[0] - 1.0).abs() < 1e-12);
    assert_eq!(v["checks"][0]["name"], "staircase");

    let report = dir.path().join("report.json");
    let out = opjensen(&["verify", "-i", s(&cert), "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&report);
    assert_eq!(r["passed"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn construct_with_identity_isometry_is_trivial() {
    let dir = TempDir::new().unwrap();
    let a = herm(&dir, "a.json", &[&[2.0, 1.0], &[1.0, -3.0]]);
    let w = write(&dir, "w.json", &ComplexMatrix::identity(2), Some(MatrixKind::Isometry));
    let cert = dir.path().join("cert.json");
    let out = opjensen(&["construct", "thm1", "-i", s(&a), "-i", s(&w), "--fn", "square", "--out", s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&cert);
    let xm: MatrixFile = serde_json::from_value(v["x"].clone()).unwrap();
    let ym: MatrixFile = serde_json::from_value(v["y"].clone()).unwrap();
    let d = xm.to_matrix().unwrap().sub(&ym.to_matrix().unwrap()).unwrap().frobenius_norm();
    assert!(d < 1e-10);
}

#[test]
fn contraction_precondition_exit_code() {
    let dir = TempDir::new().unwrap();
    let a = herm(&dir, "a.json", &[&[2.0, 0.0], &[0.0, -2.0]]);
    let z = write(&dir, "z.json", &ComplexMatrix::identity(2).scale(1.5), None);
    let out = opjensen(&["construct", "contraction", "-i", s(&a), "-i", s(&z), "--fn", "abs"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a contraction"));

    let half = write(&dir, "half.json", &ComplexMatrix::identity(2).scale(0.5), None);
    let out = opjensen(&["construct", "contraction", "-i", s(&a), "-i", s(&half), "--fn", "exp"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn io_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let out = opjensen(&["verify", "-i", s(&missing), "-i", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"rows\": 2}").unwrap();
    let out = opjensen(&["verify", "-i", s(&garbage), "-i", s(&garbage)]);
    assert_eq!(out.status.code(), Some(2));

    let a = herm(&dir, "a.json", &[&[1.0]]);
    let out = opjensen(&["construct", "midpoint", "-i", s(&a), "-i", s(&a), "--fn", "power_p:q=2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = opjensen(&["construct", "bogus", "--fn", "abs"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hand_made_failing_pair() {
    let dir = TempDir::new().unwrap();
    let x = herm(&dir, "x.json", &[&[1.0]]);
    let y = herm(&dir, "y.json", &[&[0.0]]);
    let u = write(&dir, "u.json", &ComplexMatrix::identity(1), Some(MatrixKind::Unitary));
    let report = dir.path().join("r.json");
    let out = opjensen(&["verify", "-i", s(&x), "-i", s(&y), "-i", s(&u), "-i", s(&u), "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&report);
    assert_eq!(r["passed"], false);
    assert_eq!(r["checks"][0]["name"], "certificate");
    assert_eq!(r["checks"][0]["worst_margin"].as_f64(), Some(-1.0));

    // In dimension 2 the margin is relative to ‖x‖_F = √2.
    let x2 = herm(&dir, "x2.json", &[&[1.0, 0.0], &[0.0, 1.0]]);
    let y2 = herm(&dir, "y2.json", &[&[0.0, 0.0], &[0.0, 0.0]]);
    let u2 = write(&dir, "u2.json", &ComplexMatrix::identity(2), Some(MatrixKind::Unitary));
    let out = opjensen(&["verify", "-i", s(&x2), "-i", s(&y2), "-i", s(&u2), "-i", s(&u2), "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(1));
    let m = json(&report)["checks"][0]["worst_margin"].as_f64().unwrap();
    assert!((m + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
}

#[test]
fn verify_csv() {
    let dir = TempDir::new().unwrap();
    let x = herm(&dir, "x.json", &[&[3.0, 0.0, 0.0], &[0.0, 3.0, 0.0], &[0.0, 0.0, 3.0]]);
    let y = herm(&dir, "y.json", &[&[4.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 0.0]]);
    let out = opjensen(&["verify", "-i", s(&x), "-i", s(&y), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["name", "passed", "worst_margin", "location"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let names: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(names, ["staircase", "fan_sums", "weyl"]);
    assert_eq!(&rows[2][1], "false");
}

#[test]
fn fuzz_theorem_target_passes() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("f.json");
    let out = opjensen(&[
        "fuzz", "--target", "thm1", "--dim", "6", "--sub", "3", "--fn", "abs", "--trials", "1000", "--seed", "7",
        "--out", s(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out_path);
    assert_eq!(r["status"], "PASS");
    assert_eq!(r["violations"].as_array().unwrap().len(), 0);
    assert!(r["wall_time_seconds"].is_f64());
}

#[test]
fn fuzz_open_target_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (p1, p2) = (dir.path().join("1.json"), dir.path().join("2.json"));
    for p in [&p1, &p2] {
        let out = opjensen(&[
            "fuzz", "--target", "q15", "--fn", "neg", "--trials", "5000", "--seed", "1", "--no-timing", "--out", s(p),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(a, b);
    let r = json(&p1);
    assert_eq!(r["status"], "OPEN");
    assert!(r["note"].as_str().unwrap().contains("necessary conditions"));
    assert!(r.get("wall_time_seconds").is_none());
}

#[test]
fn fuzz_rejects_wrong_kind() {
    let out = opjensen(&["fuzz", "--target", "q15", "--fn", "abs", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let out = opjensen(&["fuzz", "--target", "thm21", "--fn", "exp", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tolerance_flag() {
    let dir = TempDir::new().unwrap();
    let x = herm(&dir, "x.json", &[&[1.0]]);
    let y = herm(&dir, "y.json", &[&[0.99]]);
    assert_eq!(opjensen(&["verify", "-i", s(&x), "-i", s(&y)]).status.code(), Some(1));
    assert_eq!(opjensen(&["verify", "-i", s(&x), "-i", s(&y), "--tol", "0.02"]).status.code(), Some(0));
    assert_eq!(opjensen(&["verify", "-i", s(&x), "-i", s(&y), "--tol", "order=0.02"]).status.code(), Some(0));
    assert_eq!(opjensen(&["verify", "-i", s(&x), "-i", s(&y), "--tol", "nope=1"]).status.code(), Some(2));
}
