//! End-to-end checks of the `finsler` binary: exit-code contract, report
//! files, and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_file(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("report written");
    serde_json::from_str(&text).expect("valid json")
}

#[test]
fn tensors_on_flat_space_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tensors.json");
    let run = finsler(&[
        "tensors",
        "--metric",
        "euclidean",
        "--n",
        "2",
        "--x",
        "0,0",
        "--y",
        "1,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");
    let v = json_file(&out);
    assert_eq!(v["f"].as_f64().unwrap(), 1.0);
    for name in ["chern_hh", "riemann", "ricci_tensor"] {
        let data = v[name]["data"].as_array().unwrap();
        for entry in data {
            assert!(entry.as_f64().unwrap().abs() < 1e-8, "{name} not flat");
        }
    }
    assert_eq!(v["ricci_scalar"].as_f64().unwrap(), 0.0);
}

#[test]
fn tensors_reports_sphere_flag_curvature_and_funk_ricci() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sphere.json");
    let run = finsler(&[
        "tensors",
        "--metric",
        "sphere",
        "--n",
        "2",
        "--x",
        "0.1,0.2",
        "--y",
        "1,0",
        "--flag",
        "0,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let v = json_file(&out);
    let kappa = v["flag_curvature"].as_f64().unwrap();
    assert!((kappa - 1.0).abs() <= 1e-5, "kappa = {kappa}");

    let out = dir.path().join("funk.json");
    let run = finsler(&[
        "tensors",
        "--metric",
        "funk",
        "--n",
        "2",
        "--x",
        "0.2,-0.1",
        "--y",
        "0.8,0.3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let v = json_file(&out);
    let f = v["f"].as_f64().unwrap();
    let ric = v["ricci_scalar"].as_f64().unwrap();
    assert!(
        (ric / (f * f) + 0.25).abs() <= 1e-4,
        "funk Ric/F^2 = {}",
        ric / (f * f)
    );
}

#[test]
fn check_passes_on_models_and_fails_on_perturbed_randers() {
    let run = finsler(&["check", "--metric", "sphere", "--n", "2", "--points", "40"]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");
    let run = finsler(&[
        "check",
        "--metric",
        "euclidean",
        "--n",
        "2",
        "--points",
        "40",
    ]);
    assert_eq!(run.status.code(), Some(0));

    // A perturbed Randers metric in dimension 3 has a genuine integrability
    // obstruction: verdict failure, exit code 2.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("randers3.json");
    std::fs::write(
        &cfg,
        r#"{
            "kind": "randers", "dimension": 3,
            "params": {
                "a": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
                "b": ["0.3 + 0.1 * x_2", "0", "0"]
            }
        }"#,
    )
    .unwrap();
    let run = finsler(&["check", "--config", cfg.to_str().unwrap(), "--points", "15"]);
    assert_eq!(run.status.code(), Some(2), "{run:?}");
}

#[test]
fn check_reports_are_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let run = finsler(&[
            "check",
            "--metric",
            "funk",
            "--n",
            "2",
            "--points",
            "25",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(run.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same config + seed must give byte-identical reports"
    );
}

#[test]
fn conjugate_point_of_the_sphere_lands_at_pi() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conj.json");
    let run = finsler(&[
        "conjugate",
        "--metric",
        "sphere",
        "--n",
        "2",
        "--length",
        "4",
        "--step",
        "2e-3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let v = json_file(&out);
    let s = v["conjugate_s"].as_f64().unwrap();
    assert!((s - std::f64::consts::PI).abs() <= 1e-3, "s* = {s}");
}

#[test]
fn geodesic_csv_has_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let run = finsler(&[
        "geodesic",
        "--metric",
        "sphere",
        "--n",
        "2",
        "--length",
        "0.5",
        "--step",
        "1e-2",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "s,x1,x2,v1,v2");
    assert_eq!(text.lines().count(), 52); // header + 51 samples
}

#[test]
fn projparam_matches_tangent_on_the_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pp.csv");
    let run = finsler(&[
        "projparam",
        "--metric",
        "sphere",
        "--n",
        "2",
        "--length",
        "1.4",
        "--step",
        "2e-3",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,x1,x2,v1,v2,p,dp,d2p");
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    let (s, p) = (cols[0], cols[5]);
    assert!(
        (p - s.tan()).abs() <= 1e-5 * (1.0 + s.tan()),
        "p({s}) = {p}"
    );
}

#[test]
fn bonnet_exit_codes_and_hypothesis_violation() {
    // Flat space: hypothesis violated, exit 2.
    let run = finsler(&[
        "bonnet",
        "--metric",
        "euclidean",
        "--n",
        "2",
        "--lambda",
        "1",
        "--geodesics",
        "2",
        "--length",
        "1",
        "--step",
        "5e-3",
    ]);
    assert_eq!(run.status.code(), Some(2), "{run:?}");
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("hypothesis-violated"), "{stdout}");

    // Sphere from an equator start: all checks pass, exit 0.
    let run = finsler(&[
        "bonnet",
        "--metric",
        "sphere",
        "--n",
        "2",
        "--lambda",
        "1",
        "--geodesics",
        "2",
        "--step",
        "4e-3",
        "--start",
        "1,0",
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");
}

#[test]
fn mobius_classifies_conformal_factors() {
    // Constant factors are Möbius.
    let run = finsler(&[
        "mobius",
        "--metric",
        "euclidean",
        "--n",
        "2",
        "--phi",
        "2.5",
        "--points",
        "10",
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");

    // The stereographic factor is Möbius on flat space.
    let run = finsler(&[
        "mobius",
        "--metric",
        "euclidean",
        "--n",
        "2",
        "--phi",
        "0 - ln(1 + (x_1^2 + x_2^2)/4)",
        "--points",
        "10",
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");

    // A cubic factor is not.
    let run = finsler(&[
        "mobius",
        "--metric",
        "euclidean",
        "--n",
        "2",
        "--phi",
        "x_1^3",
        "--points",
        "10",
    ]);
    assert_eq!(run.status.code(), Some(2), "{run:?}");
}

#[test]
fn execution_errors_exit_with_one() {
    // Unknown config keys are rejected.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"kind": "sphere", "dimension": 2, "radius": 3}"#).unwrap();
    let run = finsler(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));

    // Unknown catalog name.
    let run = finsler(&["check", "--metric", "nope", "--n", "2"]);
    assert_eq!(run.status.code(), Some(1));

    // Bad expression.
    let run = finsler(&[
        "mobius",
        "--metric",
        "euclidean",
        "--n",
        "2",
        "--phi",
        "x_1 +",
    ]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn max_order_env_var_caps_the_engine() {
    let run = Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args([
            "tensors", "--metric", "sphere", "--n", "2", "--x", "0.1,0.2", "--y", "1,0",
        ])
        .env("FINSLER_MAX_ORDER", "3")
        .output()
        .expect("binary runs");
    assert_eq!(run.status.code(), Some(1), "{run:?}");
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("depth"), "{stderr}");
}
