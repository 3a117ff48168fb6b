use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fglab"))
        .args(args)
        .env("FGLAB_OUT_DIR", dir)
        .output()
        .expect("fglab runs")
}

fn result(dir: &Path, args: &[&str]) -> Value {
    let out = run(dir, args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["result"].clone()
}

#[test]
fn poincare_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let r = result(dir.path(), &["fg-expand", "--preset", "poincare"]);
    let c = &r["series"]["coefficients"];
    assert_eq!(c[2][0].as_f64().unwrap(), -0.5);
    assert_eq!(c[4][0].as_f64().unwrap(), 0.0625);
    assert!(r["residualSlope"]["fit"]["floor_hit"].as_bool().unwrap());
    assert!(dir.path().join("fg-expand.json").exists());
}

#[test]
fn cusp_has_flat_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let r = result(dir.path(), &["fg-expand", "--preset", "cusp"]);
    let coeffs = r["series"]["coefficients"].as_array().unwrap();
    for (k, c) in coeffs.iter().enumerate() {
        for point in c.as_array().unwrap() {
            for (i, row) in point.as_array().unwrap().iter().enumerate() {
                for (j, v) in row.as_array().unwrap().iter().enumerate() {
                    let expected = if k == 0 && i == j { 1.0 } else { 0.0 };
                    assert_eq!(v.as_f64().unwrap(), expected);
                }
            }
        }
    }
}

#[test]
fn residual_slope_on_circle_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let r = result(dir.path(), &["fg-expand", "--preset", "circle-sphere"]);
    let slope = r["residualSlope"]["fit"]["exponent"].as_f64().unwrap();
    assert!(slope >= r["residualSlope"]["expectedAtLeast"].as_f64().unwrap());
}

#[test]
fn even_n_resonance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["fg-expand", "--preset", "even-n-resonance"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "log-resonance");
    let r = result(dir.path(), &["fg-expand", "--preset", "even-n-resonance", "--resolve-log"]);
    assert!(r["series"]["log_obstruction"].is_object() || r["series"]["log_obstruction"].is_array());
}

#[test]
fn invalid_input_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["fg-expand", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid-argument");
    let out = run(dir.path(), &["evolve", "--preset", "poincare", "--ode-tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_matches_poincare() {
    let dir = tempfile::tempdir().unwrap();
    let r = result(dir.path(), &["evolve", "--preset", "poincare", "--t1", "1.5"]);
    assert!(r["poincareMaxRelativeError"].as_f64().unwrap() < 1e-8);
    assert!(r["constraintsWithinBound"].as_bool().unwrap());
    let csv = std::fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    assert!(csv.starts_with("t,block0,"));
    assert_eq!(csv.lines().count(), 122);
}

#[test]
fn schwarzschild_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let r = result(dir.path(), &["schwarzschild", "--n", "3", "--m", "1"]);
    assert!((r["rPlus"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["beta"].as_f64().unwrap() - PI).abs() < 1e-12);
    let g = r["gN"].as_array().unwrap();
    assert!((g[0].as_f64().unwrap() + 4.0 / 3.0).abs() < 1e-6);
    assert!((g[1].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn torus_example_identity() {
    let dir = tempfile::tempdir().unwrap();
    let r = result(dir.path(), &["torus-example"]);
    assert!(r["identity"]["relative_error"].as_f64().unwrap() < 1e-6);
    assert!(r["lhsRelativeError"].as_f64().unwrap() < 1e-9);
    let ext = r["killingExtension"].as_array().unwrap();
    assert!(!ext[0]["extends"].as_bool().unwrap());
    assert!(ext[1]["extends"].as_bool().unwrap() && ext[2]["extends"].as_bool().unwrap());
}

#[test]
fn decay_of_identical_data_hits_floor() {
    let dir = tempfile::tempdir().unwrap();
    let r = result(dir.path(), &["decay", "--preset", "circle-sphere"]);
    assert!(r["floorHit"].as_bool().unwrap());
    let r = result(dir.path(), &["decay", "--preset", "circle-sphere", "--g-n-b", "0,0"]);
    let e = r["traceFreeExponent"]["exponent"].as_f64().unwrap();
    assert!((e - 3.0).abs() < 0.05);
}

#[test]
fn constraints_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "preset = \"circle-sphere\"\ng_n = [0.5, -0.1]\n").unwrap();
    let r = result(dir.path(), &["constraints", "--config", cfg.to_str().unwrap()]);
    assert!(!r["membership"]["isMember"].as_bool().unwrap());
    let r = result(dir.path(), &["constraints", "--config", cfg.to_str().unwrap(), "--g-n", "0.2,-0.1"]);
    assert!(r["membership"]["isMember"].as_bool().unwrap());
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["schwarzschild", "--points", "41"];
    let first = run(a.path(), &args);
    let second = run(b.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    let file = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(file(a.path(), "schwarzschild.json"), file(b.path(), "schwarzschild.json"));
    assert_eq!(file(a.path(), "schwarzschild.csv"), file(b.path(), "schwarzschild.csv"));

    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["configHash"].as_str().unwrap().len(), 64);
    assert!(v["tolerances"]["ode"].is_number());
    assert!(v["versions"]["fglab"].is_string());
    assert!(v["seed"].is_u64());
}
