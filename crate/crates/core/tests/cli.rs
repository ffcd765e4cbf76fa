//! The `capcone` binary end to end: outputs, sidecars and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use capcone::io::{manifest_path, read_json, read_obj};
use serde_json::Value;

fn capcone(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capcone"))
        .args(args)
        .env("CAPCONE_OUT_DIR", dir)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn classify_prints_case_and_sign() {
    let dir = tempfile::tempdir().unwrap();
    let o = capcone(dir.path(), &["--degrees", "classify", "--gamma", "150", "--phi", "30"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["case"], "ConcaveA");
    assert_eq!(v["H"], "Negative");
    let o = capcone(dir.path(), &["classify", "--gamma", "0.3", "--phi", "0.5236"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["case"], "TwoCapsC");
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&capcone(dir.path(), &["classify", "--gamma", "1.0"])), 1);
    assert_eq!(code(&capcone(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&capcone(dir.path(), &["classify", "--gamma", "4.0", "--phi", "0.5"])), 1);
    assert_eq!(code(&capcone(dir.path(), &["sweep", "--in", "missing.obj", "--phi", "0.5"])), 1);
    assert_eq!(code(&capcone(dir.path(), &["--help"])), 0);
}

#[test]
fn construct_then_sweep_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = capcone(p, &["construct", "--gamma", "2.5", "--phi", "0.5", "--resolution", "32x16", "--out", "cap.obj"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let obj = read_obj(&p.join("cap.obj")).unwrap();
    assert_eq!(obj.mesh.vertices().len(), 1 + 32 * 16);
    assert_eq!(obj.manifest.unwrap().command, "construct");
    let config: Value = read_json(&p.join("cap.json")).unwrap();
    assert_eq!(config["case"], "ConcaveA");
    assert!(manifest_path(&p.join("cap.json")).exists());

    let o = capcone(p, &["sweep", "--in", "cap.obj", "--phi", "0.5", "--out", "sweep.json"]);
    assert_eq!(code(&o), 0);
    let rep: Value = read_json(&p.join("sweep.json")).unwrap();
    assert_eq!(rep["terminal"], "ReachedZero");

    let o = capcone(p, &["verify", "--in", "cap.obj", "--check", "inversion", "--radius", "0.8"]);
    assert_eq!(code(&o), 0);
    let o = capcone(p, &["verify", "--in", "cap.obj", "--check", "symmetry"]);
    assert_eq!(code(&o), 0);
    // a concave cap is not invariant under inversion
    let o = capcone(p, &["verify", "--in", "cap.obj", "--check", "residual"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_of_a_folded_mesh_needs_the_flag_and_stalls() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mesh = capcone::specimens::folded_revolution(0.5, 32, 40).unwrap();
    let manifest = capcone::io::RunManifest::new("test");
    capcone::io::write_obj(&p.join("fold.obj"), &mesh, &manifest).unwrap();
    assert_eq!(code(&capcone(p, &["sweep", "--in", "fold.obj", "--phi", "0.5"])), 1);
    let o = capcone(p, &["sweep", "--in", "fold.obj", "--phi", "0.5", "--allow-non-graph"]);
    assert_eq!(code(&o), 2);
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["terminal"], "Stalled");
}

#[test]
fn solve_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = capcone(p, &["solve", "--gamma", "2.0", "--phi", "0.5", "--grid", "24x16", "--out", "drop"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["drop.csv", "drop.obj", "drop_history.csv", "drop.json", "drop_equilibrium.json"] {
        assert!(p.join(f).exists(), "{f}");
    }
    let rho = capcone::io::read_field_rho(&p.join("drop.csv"), 1 + 24 * 16).unwrap();
    assert!(rho.iter().all(|r| *r > 0.0));
    let result: Value = read_json(&p.join("drop.json")).unwrap();
    assert_eq!(result["converged"], true);
    let eq: Value = read_json(&p.join("drop_equilibrium.json")).unwrap();
    assert_eq!(eq["signAgrees"], true);
    let history = std::fs::read_to_string(p.join("drop_history.csv")).unwrap();
    assert!(history.starts_with("iteration,energy,gradNorm,hMean,hSpread"));
}

#[test]
fn degenerate_solve_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = capcone(dir.path(), &["solve", "--gamma", "0.3", "--phi", "0.5", "--grid", "16", "--out", "d"]);
    assert_eq!(code(&o), 3);
}
