use std::fs;
use std::path::Path;
use std::process::Command;

use epac_kit::cli::{
    cmd_compare_harmonic, cmd_figures, cmd_pimc, cmd_table1, cmd_validate, Figure, RunConfig,
};
use epac_kit::model::PolynomialPotential;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_epac-kit"))
}

fn write_config(dir: &Path, json: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path
}

#[test]
fn config_defaults_and_validation() {
    let cfg = RunConfig::from_json(
        r#"{ "potential": { "coeffs": [0, 0, 0.5, 0.1, 0.01], "mass": 1.0, "hbar": 1.0 } }"#,
    )
    .unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.potential, PolynomialPotential::asymmetric_quartic());
    assert_eq!((cfg.time.t_max, cfg.time.n_t), (25.0, 1001));
    assert!(RunConfig::from_json(r#"{ "unknown": 1 }"#).is_err());
    assert!(RunConfig::from_json(r#"{ "betas": [-1] }"#).is_err());
    assert!(RunConfig::from_json(r#"{ "potential": { "coeffs": [0, 0, 0.5, 0.1] } }"#).is_err());
    assert!(RunConfig::from_json(r#"{ "pimc": { "beads": 4 } }"#).is_err());
    assert!(RunConfig::from_json(
        r#"{ "grid": { "q_lo": 1, "q_hi": -1, "n_points": 30, "n_states": 5 } }"#
    )
    .is_err());
}

#[test]
fn config_hash_tracks_content() {
    let a = RunConfig::default();
    let b = RunConfig::from_json("{}").unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
    let c = RunConfig {
        seed: 7,
        ..RunConfig::default()
    };
    assert_ne!(a.hash(), c.hash());
}

#[test]
fn compare_harmonic_is_deterministic() {
    let cfg = RunConfig::default();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let r1 = cmd_compare_harmonic(&cfg, d1.path()).unwrap();
    cmd_compare_harmonic(&cfg, d2.path()).unwrap();
    assert!(r1.passed);
    for file in &r1.files {
        let name = file.file_name().unwrap();
        assert_eq!(
            fs::read(file).unwrap(),
            fs::read(d2.path().join(name)).unwrap()
        );
    }
    let text = fs::read_to_string(d1.path().join("compare_harmonic_beta_10.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!("# config_sha256: {}", cfg.hash())
    );
    assert_eq!(
        lines.next().unwrap(),
        "t,exact_canonical,cmd_co,cmd_eco,rpmd"
    );
    assert_eq!(lines.count(), 1001);
}

#[test]
fn harmonic_table_has_vanishing_cubic_and_quartic() {
    let cfg =
        RunConfig::from_json(r#"{ "potential": { "coeffs": [0, 0, 0.5] }, "betas": [1, 10] }"#)
            .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = cmd_table1(&cfg, dir.path()).unwrap();
    assert!(report.passed && report.checks.is_empty());
    for row in report.data["rows"].as_array().unwrap() {
        assert!(row["a3"].as_f64().unwrap().abs() < 1e-6);
        assert!(row["a4"].as_f64().unwrap().abs() < 1e-6);
        assert!((row["omega_beta"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn table_row_at_unit_temperature() {
    let cfg = RunConfig::from_json(r#"{ "betas": [1] }"#).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = cmd_table1(&cfg, dir.path()).unwrap();
    assert!(report.passed, "{:?}", report.checks);
    let row = &report.data["rows"][0];
    let expect = [-0.3375973, 0.91069063, 0.41549732, 0.3305302];
    for (key, e) in ["Q_min", "omega_beta", "a3", "a4"].iter().zip(expect) {
        assert!(
            (row[*key].as_f64().unwrap() / e - 1.0).abs() < 1e-3,
            "{key}"
        );
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("table1.json")).unwrap()).unwrap();
    assert_eq!(json["config_sha256"], cfg.hash());
}

#[test]
fn figure_panels() {
    let cfg = RunConfig::from_json(r#"{ "betas": [10], "figure_betas": [10] }"#).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = cmd_figures(&cfg, Figure::All, dir.path()).unwrap();
    assert!(report.passed, "{:?}", report.checks);
    let fig2 = fs::read_to_string(dir.path().join("fig2_beta_10.csv")).unwrap();
    let lowest = fig2
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(lowest, 0.0);
    let fig3 = fs::read_to_string(dir.path().join("fig3_beta_10.csv")).unwrap();
    let first: Vec<f64> = fig3
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(((first[1] - first[3]) / first[3]).abs() < 0.05);
    let fig1 = fs::read_to_string(dir.path().join("fig1_beta_10.csv")).unwrap();
    let first: Vec<f64> = fig1
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((first[4] - first[1]).abs() < 1e-3);
    assert!(dir.path().join("fig4_beta_10.csv").exists());
}

#[test]
fn pimc_report_is_deterministic() {
    let cfg = RunConfig::from_json(
        r#"{ "betas": [1], "pimc_sources": [0, 0.5], "pimc": { "sweeps": 4000, "burn_in": 1000 } }"#,
    )
    .unwrap();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let r = cmd_pimc(&cfg, d1.path()).unwrap();
    cmd_pimc(&cfg, d2.path()).unwrap();
    let a = fs::read(d1.path().join("pimc.json")).unwrap();
    assert_eq!(a, fs::read(d2.path().join("pimc.json")).unwrap());
    let rows = r.data["estimates"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for key in ["J", "mean", "stderr", "acceptance", "P", "sweeps", "seed"] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn tiny_grid_reports_boundary_leak() {
    let cfg = RunConfig::from_json(
        r#"{ "grid": { "q_lo": -2, "q_hi": 2, "n_points": 30, "n_states": 10 },
             "validate_pimc": false, "figure_betas": [10], "harmonic_betas": [10] }"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = cmd_validate(&cfg, dir.path()).unwrap();
    assert!(!report.passed);
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0]
        .detail
        .as_deref()
        .unwrap()
        .contains("boundary leak"));
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let ok = bin()
        .args(["compare-harmonic", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(out.join("compare-harmonic.json").exists());

    let leak = write_config(
        dir.path(),
        r#"{ "grid": { "q_lo": -2, "q_hi": 2, "n_points": 30, "n_states": 10 },
             "validate_pimc": false, "figure_betas": [10], "harmonic_betas": [10] }"#,
    );
    let failed = bin()
        .args(["validate", "--config"])
        .arg(&leak)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("boundary leak"));

    let bad = write_config(dir.path(), r#"{ "betas": [0] }"#);
    let rejected = bin()
        .args(["table1", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(rejected.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("beta"));
}
