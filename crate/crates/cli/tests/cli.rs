use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgeom"))
        .args(args)
        .output()
        .expect("spawn qgeom")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn glauber_vacuum_grid_is_singular() {
    let r = json_stdout(&qgeom(&[
        "--model",
        "glauber",
        "--m",
        "0",
        "--grid",
        "-1:1:5,-1:1:5",
        "tensor",
    ]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["record_count"], 25);
    let recs = r["records"].as_array().unwrap();
    assert_eq!(recs.len(), 25);
    for rec in recs {
        assert!(rec["det"].as_f64().unwrap().abs() < 1e-8, "{rec}");
    }
    // Row-major: the second coordinate varies fastest.
    assert_eq!(recs[1]["coords"][0], recs[0]["coords"][0]);
    assert_ne!(recs[1]["coords"][1], recs[0]["coords"][1]);
}

#[test]
fn su2_metric_eigenvalues() {
    // j = 1, m = 0: g = diag(1, sin^2 theta).
    let r = json_stdout(&qgeom(&[
        "--model",
        "su2",
        "--j",
        "1",
        "--m",
        "0",
        "--grid",
        "0.5:1.5:3,0:1:2",
        "tensor",
    ]));
    for rec in r["records"].as_array().unwrap() {
        let theta = rec["coords"][0].as_f64().unwrap();
        let mut ev: Vec<f64> = rec["g_eigenvalues"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        ev.sort_by(f64::total_cmp);
        let mut want = [1.0, theta.sin().powi(2)];
        want.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-6, "theta {theta}: {ev:?} vs {want:?}");
        }
    }
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(
        code(&qgeom(&["--model", "glauber", "--grid", "0:1:1,0:1:3", "tensor"])),
        2
    );
    assert_eq!(code(&qgeom(&["--model", "su2", "--j", "1", "--m", "5", "series"])), 2);
    assert_eq!(code(&qgeom(&["--engine", "magic", "tensor"])), 2);
    assert_eq!(code(&qgeom(&["--model", "su2", "--j", "1", "--m", "0", "holonomy"])), 2);
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "model = glauber\ncolour = blue\n").unwrap();
    assert_eq!(code(&qgeom(&["--config", cfg.to_str().unwrap(), "tensor"])), 2);
}

#[test]
fn out_of_domain_exits_3() {
    let out = qgeom(&[
        "--model",
        "su11",
        "--series",
        "dplus",
        "--j",
        "-1",
        "--m",
        "1",
        "--grid",
        "5:6:2,0:1:2",
        "tensor",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn series_reports_validity() {
    let r = json_stdout(&qgeom(&["--series", "dplus", "--j", "-1", "--m", "3", "series"]));
    assert_eq!(r["records"][0]["valid"], true);
    let out = qgeom(&["--series", "dplus", "--j", "-1", "--m", "-2", "series"]);
    assert_eq!(code(&out), 2);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["records"][0]["valid"], false);
}

#[test]
fn check_suites_pass() {
    for suite in ["uncertainty", "stokes", "gauge", "bo"] {
        let r = json_stdout(&qgeom(&["check", suite]));
        assert_eq!(r["failed"], 0, "{suite}");
        assert!(r["passed"].as_u64().unwrap() > 0);
    }
}

#[test]
fn undersized_truncation_fails_oracle_check() {
    let out = qgeom(&[
        "--model", "su11", "--series", "dplus", "--j", "-1", "--m", "1", "--trunc", "8", "check", "oracle",
    ]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("TruncationInsufficient"), "{stderr}");
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["failed"], 1);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "--model",
        "su11",
        "--series",
        "dplus",
        "--j",
        "-1.5",
        "--m",
        "2.5",
        "--trunc",
        "64",
        "christoffel",
    ];
    let a = qgeom(&args);
    let b = qgeom(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn summary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let out = qgeom(&["--model", "su2", "--j", "1.5", "--m", "0.5", "--out", p, "uncertainty"]);
    assert!(out.status.success());
    let summary = qgeom(&["summary", p]);
    assert!(summary.status.success(), "{}", String::from_utf8_lossy(&summary.stderr));

    // Tampering with a record must be detected.
    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    report["records"][0]["det"] = Value::from(1e3);
    std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(code(&qgeom(&["summary", p])), 4);
}

#[test]
fn csv_output_has_flattened_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = qgeom(&[
        "--model",
        "glauber",
        "--grid",
        "0:1:2,0:1:3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
        "tensor",
    ]);
    assert!(out.status.success());
    let mut rd = csv::Reader::from_path(Path::new(&path)).unwrap();
    let header = rd.headers().unwrap().clone();
    for col in ["index", "coords_0", "coords_1", "c2_re_0", "c2_im_3", "det"] {
        assert!(header.iter().any(|h| h == col), "missing {col} in {header:?}");
    }
    assert_eq!(rd.records().count(), 6);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep\nmodel = su2\nj = 1\nm = 0\ngrid = 0.5:1:2,0:1:2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let r = json_stdout(&qgeom(&["--config", c, "tensor"]));
    assert_eq!(r["record_count"], 4);
    let r = json_stdout(&qgeom(&["--config", c, "--grid", "0.5:1:3,0:1:2", "tensor"]));
    assert_eq!(r["record_count"], 6);
    assert_eq!(r["config"]["grid"], "0.5:1:3,0:1:2");
}

#[test]
fn geodesic_and_bo_run() {
    let r = json_stdout(&qgeom(&[
        "--model",
        "su2",
        "--j",
        "1",
        "--m",
        "0",
        "--geodesic",
        "1:0:0:1:1:20",
        "geodesic",
    ]));
    assert_eq!(r["record_count"], 21);
    let r = json_stdout(&qgeom(&[
        "--model",
        "su2",
        "--j",
        "1",
        "--m",
        "0",
        "--grid",
        "0.5:1:2,0:1:2",
        "--mass-q",
        "1,2,0.1,0",
        "bo",
    ]));
    for rec in r["records"].as_array().unwrap() {
        assert!(rec["force_deviation"].as_f64().unwrap() < 1e-5);
    }
}

#[test]
fn riemann_flags_coordinate_singularity() {
    // D+ with j = -1 has constant scalar curvature -4; rho = 0 is a polar singularity.
    let r = json_stdout(&qgeom(&[
        "--model",
        "su11",
        "--series",
        "dplus",
        "--j",
        "-1",
        "--m",
        "1",
        "--grid",
        "0:1:3,0:1:2",
        "riemann",
    ]));
    for rec in r["records"].as_array().unwrap() {
        let rho = rec["coords"][0].as_f64().unwrap();
        if rho == 0.0 {
            assert_eq!(rec["singular"], true);
            assert!(rec["scalar"].is_null());
        } else {
            let scalar = rec["scalar"].as_f64().unwrap();
            assert!((scalar + 4.0).abs() < 1e-4, "rho {rho}: {scalar}");
        }
    }
}
