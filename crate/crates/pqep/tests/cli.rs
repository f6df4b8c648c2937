//! End-to-end tests of the `pqep` binary: file formats, reports, exit codes.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pqep")
}

fn tmpdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("pqep-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_json(path: &Path, value: &serde_json::Value) {
    std::fs::write(path, serde_json::to_string_pretty(value).unwrap()).unwrap();
}

fn matrix_json(m: &pqep::mat::CMat, real: bool) -> serde_json::Value {
    let doc = pqep::io::MatrixFile::from_matrix(m, real);
    serde_json::to_value(&doc).unwrap()
}

#[test]
fn eig_reports_reference_spectrum_with_units() {
    // the 3x3 anti-palindromic fixture has eigenvalues including +1 and -1
    let dir = tmpdir("eig");
    let fx = common::eep_t_anti_3x3();
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T-",
            "a": matrix_json(fx.poly.a(), true),
            "q": matrix_json(fx.poly.q(), true),
        }),
    );
    let out = run(&[&"eig", file.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("pairing=closed"));
    assert!(text.contains("verdict=pass"));
    // six eigenvalues, with +1 and -1 among them
    let mut vals = Vec::new();
    for k in 0..6 {
        let re_key = format!("eigenvalue.{k}.re=");
        let line = text
            .lines()
            .find(|l| l.starts_with(&re_key))
            .expect("eigenvalue line");
        let v: f64 = line.split('=').nth(1).unwrap().parse().unwrap();
        vals.push(v);
    }
    assert!(vals.iter().any(|v| (v - 1.0).abs() < 1e-6));
    assert!(vals.iter().any(|v| (v + 1.0).abs() < 1e-6));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eig_identity_a_zero_q_gives_unit_imaginaries() {
    let dir = tmpdir("eigi");
    let n = 3;
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "H+",
            "a": matrix_json(&pqep::mat::eye(n), false),
            "q": matrix_json(&pqep::mat::zeros(n, n), false),
        }),
    );
    let out = run(&[&"eig", file.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json report parses");
    for k in 0..2 * n {
        let im: f64 = v[format!("eigenvalue.{k}.im")]
            .as_str()
            .unwrap()
            .parse()
            .unwrap();
        assert!((im.abs() - 1.0).abs() < 1e-9);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eig_rejects_nonsymmetric_q_with_exit_3() {
    let dir = tmpdir("eig3");
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T+",
            "a": {"rows": 2, "cols": 2, "field": "real", "data": [1.0, 0.0, 0.0, 1.0]},
            "q": {"rows": 2, "cols": 2, "field": "real", "data": [1.0, 2.0, 0.0, 1.0]},
        }),
    );
    let out = run(&[&"eig", file.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn qiep_writes_files_and_passes() {
    let dir = tmpdir("qiep");
    let file = dir.join("p.json");
    let eigs: Vec<[f64; 2]> = common::qiep_t_eigenvalues()
        .iter()
        .map(|z| [z.re, z.im])
        .collect();
    write_json(
        &file,
        &serde_json::json!({"flavor": "T+", "eigenvalues": eigs, "seed": 7}),
    );
    let outdir = dir.join("out");
    let out = run(&[
        &"qiep",
        file.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verdict=pass"));
    for f in ["A.json", "Q.json", "X.json", "Lambda.json"] {
        assert!(outdir.join(f).exists(), "{f} missing");
    }
    // determinism under fixed seed: rerun and compare bytes
    let a1 = std::fs::read(outdir.join("A.json")).unwrap();
    let out2 = run(&[
        &"qiep",
        file.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(out2.status.success());
    let a2 = std::fs::read(outdir.join("A.json")).unwrap();
    assert_eq!(a1, a2);

    // verify the round trip through the verify subcommand
    let a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("A.json")).unwrap()).unwrap();
    let q: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("Q.json")).unwrap()).unwrap();
    let x: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("X.json")).unwrap()).unwrap();
    let lam: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("Lambda.json")).unwrap())
            .unwrap();
    let vfile = dir.join("v.json");
    write_json(
        &vfile,
        &serde_json::json!({"flavor": "T+", "a": a, "q": q, "x": x, "j": lam}),
    );
    let vout = run(&[&"verify", vfile.to_str().unwrap()]);
    assert!(
        vout.status.success(),
        "{}",
        String::from_utf8_lossy(&vout.stderr)
    );
    assert!(String::from_utf8_lossy(&vout.stdout).contains("verdict=pass"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn qiep_scalar_pair_gives_1x1_outputs() {
    let dir = tmpdir("qiep1");
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({"flavor": "T+", "eigenvalues": [[2.0, 0.0], [0.5, 0.0]]}),
    );
    let outdir = dir.join("out");
    let out = run(&[
        &"qiep",
        file.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let a: pqep::io::MatrixFile =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("A.json")).unwrap()).unwrap();
    assert_eq!((a.rows, a.cols), (1, 1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn qiep_modulus_one_exits_5() {
    let dir = tmpdir("qiep5");
    let file = dir.join("p.json");
    let z = pqep::mat::C64::from_polar(1.0, std::f64::consts::PI / 3.0);
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T+",
            "eigenvalues": [[z.re, z.im], [z.re, -z.im], [2.0, 0.0], [0.5, 0.0]],
        }),
    );
    let out = run(&[&"qiep", file.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(5),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eep_fixture_passes_and_writes_outputs() {
    let dir = tmpdir("eep");
    let fx = common::eep_t_anti_3x3();
    // measured values: the unimodular pair of the oracle spectrum
    let vals: Vec<pqep::mat::C64> = pqep::oracle::qep_eigensolve(&fx.poly)
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect();
    let from: Vec<[f64; 2]> = vals
        .iter()
        .filter(|z| z.im.abs() > 1e-6 && (z.norm() - 1.0).abs() < 1e-6)
        .map(|z| [z.re, z.im])
        .collect();
    assert_eq!(from.len(), 2);
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T-",
            "a": matrix_json(fx.poly.a(), true),
            "q": matrix_json(fx.poly.q(), true),
            "replace": {"from": from, "to": [[-0.6, 0.8], [-0.6, -0.8]]},
        }),
    );
    let outdir = dir.join("out");
    let out = run(&[
        &"eep",
        file.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verdict=pass"), "{text}");
    assert!(text.contains("structure.exact=true"));
    assert!(outdir.join("A_new.json").exists() && outdir.join("Q_new.json").exists());
    // the written coefficients match the reference values
    let a: pqep::io::MatrixFile =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("A_new.json")).unwrap()).unwrap();
    let am = a.to_matrix().unwrap();
    assert!(pqep::mat::max_abs(&(&am - &fx.a_new)) < 1e-3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eep_accepts_low_precision_measured_values() {
    // values recorded at four decimals snap to the true eigenvalues
    let dir = tmpdir("eeplp");
    let fx = common::eep_t_anti_3x3();
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T-",
            "a": matrix_json(fx.poly.a(), true),
            "q": matrix_json(fx.poly.q(), true),
            "replace": {"from": [[-0.5891, 0.8081], [-0.5891, -0.8081]],
                         "to": [[-0.6, 0.8], [-0.6, -0.8]]},
        }),
    );
    let outdir = dir.join("out");
    let out = run(&[
        &"eep",
        file.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a: pqep::io::MatrixFile =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("A_new.json")).unwrap()).unwrap();
    let am = a.to_matrix().unwrap();
    assert!(pqep::mat::max_abs(&(&am - &fx.a_new)) < 1e-3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eep_overlapping_replace_exits_2() {
    let dir = tmpdir("eep2");
    let fx = common::eep_t_anti_3x3();
    let vals: Vec<pqep::mat::C64> = pqep::oracle::qep_eigensolve(&fx.poly)
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect();
    let from: Vec<[f64; 2]> = vals
        .iter()
        .filter(|z| z.im.abs() > 1e-6)
        .map(|z| [z.re, z.im])
        .collect();
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T-",
            "a": matrix_json(fx.poly.a(), true),
            "q": matrix_json(fx.poly.q(), true),
            "replace": {"from": from.clone(), "to": from},
        }),
    );
    let out = run(&[&"eep", file.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eep_unimodular_to_real_exits_4() {
    let dir = tmpdir("eep4");
    let fx = common::eep_t_anti_3x3();
    let vals: Vec<pqep::mat::C64> = pqep::oracle::qep_eigensolve(&fx.poly)
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect();
    let from: Vec<[f64; 2]> = vals
        .iter()
        .filter(|z| z.im.abs() > 1e-6 && (z.norm() - 1.0).abs() < 1e-6)
        .map(|z| [z.re, z.im])
        .collect();
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T-",
            "a": matrix_json(fx.poly.a(), true),
            "q": matrix_json(fx.poly.q(), true),
            "replace": {"from": from, "to": [[3.0, 0.0], [1.0/3.0, 0.0]]},
        }),
    );
    let out = run(&[&"eep", file.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_flags_perturbed_q() {
    let dir = tmpdir("vperturb");
    // hand fixture: scalar polynomial with its exact standard pair
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T+",
            "a": {"rows": 1, "cols": 1, "field": "real", "data": [0.6666666666666666]},
            "q": {"rows": 1, "cols": 1, "field": "real", "data": [-1.5666666666666667]},
            "x": {"rows": 1, "cols": 2, "field": "real", "data": [1.0, 1.0]},
            "j": {"rows": 2, "cols": 2, "field": "real", "data": [2.0, 0.0, 0.0, 0.5]},
        }),
    );
    let out = run(&[&"verify", file.to_str().unwrap()]);
    // perturbed Q: report produced, verdict fail, exit 1
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verdict=fail"), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_exact_hand_fixture_passes() {
    let dir = tmpdir("vexact");
    let file = dir.join("p.json");
    write_json(
        &file,
        &serde_json::json!({
            "flavor": "T+",
            "a": {"rows": 1, "cols": 1, "field": "real", "data": [0.6666666666666666]},
            "q": {"rows": 1, "cols": 1, "field": "real", "data": [-1.6666666666666667]},
            "x": {"rows": 1, "cols": 2, "field": "real", "data": [1.0, 1.0]},
            "j": {"rows": 2, "cols": 2, "field": "real", "data": [2.0, 0.0, 0.0, 0.5]},
            "gamma": {"rows": 2, "cols": 2, "field": "real", "data": [0.0, 1.0, -1.0, 0.0]},
        }),
    );
    let out = run(&[&"verify", file.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict=pass"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_file_exits_2() {
    let dir = tmpdir("bad");
    let file = dir.join("p.json");
    std::fs::write(&file, "{ not json").unwrap();
    let out = run(&[&"eig", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
