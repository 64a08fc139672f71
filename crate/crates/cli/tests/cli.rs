use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ablation(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ablation"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .env_remove("ABLATION_PARAMS")
        .output()
        .expect("binary runs")
}

/// Data rows of a CSV file, header comments and the column line skipped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn ratio_table_matches_reference_to_two_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(dir.path(), &["tables", "--which", "ratio"]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&dir.path().join("table_ratio.csv"));
    assert_eq!(r.len(), 12);
    for row in &r {
        let value: f64 = row[4].parse().unwrap();
        let reference: f64 = row[5].parse().unwrap();
        let rounded: f64 = format!("{value:.1e}").parse().unwrap();
        assert_eq!(rounded, reference, "{row:?}");
    }
}

#[test]
fn zeta0_table_reports_deviation_and_best_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(dir.path(), &["--g", "0.99", "tables", "--which", "zeta0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("table_zeta0.csv")).unwrap();
    assert!(text.contains("# best-fit g over checked rows: 0.994"));
    assert!(text.contains("# g: 9.8999999999999999e-1"));
    let r = rows(&dir.path().join("table_zeta0.csv"));
    let breast_810: f64 = r[0][4].parse().unwrap();
    assert!((breast_810 - 1.7e3).abs() < 0.3 * 1.7e3);
    let dev: f64 = r[0][6].parse().unwrap();
    assert!((dev - (breast_810 - 1.7e3) / 1.7e3).abs() < 1e-12);
}

#[test]
fn unknown_tissue_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(dir.path(), &["--tissue", "liver", "tables"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown tissue pair `liver`"));
}

#[test]
fn missing_wavelength_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(dir.path(), &["--lambda-nm", "700", "tables"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn source_profile_decays_with_a_jump_at_ell() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(
        dir.path(),
        &["profile", "--field", "source", "--axis", "z", "--from", "0", "--to", "0.01", "--samples", "101"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&dir.path().join("profile_source_z.csv"));
    let s = column(&r, 3);
    assert!(s.windows(2).all(|w| w[1] < w[0]));
    assert!(s.iter().all(|v| *v > 0.0));
    // steps of 0.1 mm with ell = 5 mm
    let k = r.iter().position(|row| row[5] == "axial_outer").unwrap();
    assert!(k == 50 || k == 51, "{k}");
    assert!(r[..k].iter().all(|row| row[5] == "core"));
    // equal steps give a constant ratio on each side; the ratio across ell differs
    let inside = s[k - 3] / s[k - 2];
    assert!((s[k - 2] / s[k - 1] / inside - 1.0).abs() < 1e-9);
    let across = s[k - 1] / s[k];
    assert!((across / inside - 1.0).abs() > 1e-3, "{inside} {across}");
    assert!(r.iter().all(|row| row[4] == "W/m^3"));
}

#[test]
fn fluence_profile_is_finite_with_exact_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(
        dir.path(),
        &["--tp-s", "1e-12", "profile", "--field", "fluence", "--axis", "r", "--from", "0", "--to", "2e-3", "--samples", "21"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&dir.path().join("profile_fluence_r.csv"));
    let phi = column(&r, 3);
    assert!(phi.iter().all(|v| v.is_finite()));
    assert!(phi[0] > 0.0);
    assert_eq!(r[20][3], "0");
}

#[test]
fn overflow_regime_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(
        dir.path(),
        &[
            "--lambda-nm", "1064", "--power-w", "1.3", "--tp-s", "1e-11", "--g", "0.99", "profile", "--field", "fluence",
            "--axis", "r", "--from", "0", "--to", "1e-3", "--samples", "5",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("overflow") && err.contains("exponent"), "{err}");
}

#[test]
fn sweep_outside_geometry_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(
        dir.path(),
        &["profile", "--field", "source", "--axis", "r", "--from", "0", "--to", "1.0", "--samples", "3"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["profile", "--field", "temperature", "--axis", "z", "--from", "0", "--to", "5e-3", "--samples", "11"];
    // the output directory is not part of the configuration
    assert_eq!(ablation(a.path(), &args).status.code(), Some(0));
    assert_eq!(ablation(b.path(), &args).status.code(), Some(0));
    let x = fs::read(a.path().join("profile_temperature_z.csv")).unwrap();
    let y = fs::read(b.path().join("profile_temperature_z.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.contains("# config_sha256: "));
    assert!(text.contains("# g: ") && text.contains("# gamma_r: "));
    assert!(text.contains("\nr_m,z_m,t_s,value,unit,region\n"));
}

#[test]
fn json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["profile", "--field", "source", "--axis", "z", "--from", "0", "--to", "4e-3", "--samples", "5"];
    assert_eq!(ablation(dir.path(), &args).status.code(), Some(0));
    let mut json_args = vec!["--format", "json"];
    json_args.extend(args);
    assert_eq!(ablation(dir.path(), &json_args).status.code(), Some(0));
    let csv = rows(&dir.path().join("profile_source_z.csv"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("profile_source_z.json")).unwrap()).unwrap();
    let jrows = doc["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), csv.len());
    for (c, j) in csv.iter().zip(jrows) {
        let v: f64 = c[3].parse().unwrap();
        assert_eq!(j["value"].as_f64().unwrap(), v);
        assert_eq!(j["region"].as_str().unwrap(), c[5]);
    }
    let text = fs::read_to_string(dir.path().join("profile_source_z.csv")).unwrap();
    assert!(text.contains(doc["config_sha256"].as_str().unwrap()));
}

#[test]
fn params_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("override.params");
    fs::write(&params, "laser.power_w = 2.5\n").unwrap();
    let args = ["profile", "--field", "source", "--axis", "z", "--from", "0", "--to", "0", "--samples", "1"];
    let base = ablation(dir.path(), &args);
    assert_eq!(base.status.code(), Some(0));
    let full = column(&rows(&dir.path().join("profile_source_z.csv")), 3)[0];
    let out = Command::new(env!("CARGO_BIN_EXE_ablation"))
        .arg("--out")
        .arg(dir.path())
        .args(args)
        .env("ABLATION_PARAMS", &params)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let half = column(&rows(&dir.path().join("profile_source_z.csv")), 3)[0];
    assert!((half / full - 0.5).abs() < 1e-14);

    fs::write(&params, "laser.power_w = lots\n").unwrap();
    let bad = ablation(dir.path(), &["--params", params.to_str().unwrap(), "tables"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn validate_damage_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(dir.path(), &["validate", "--suite", "damage"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("validation.json")).unwrap()).unwrap();
    assert_eq!(doc["passed"], Value::Bool(true));
    let checks = doc["suites"][0]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "upper_bound_t_b"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() == checks.len());
}

#[test]
fn fd_run_writes_field_and_probes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ablation(dir.path(), &["fd-run", "--field", "fluence", "--grid", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let field = rows(&dir.path().join("fd_fluence.csv"));
    assert_eq!(field.len(), 4 * 500);
    let probes = rows(&dir.path().join("fd_fluence_probes.csv"));
    assert_eq!(probes.len(), 10);
    assert!(column(&probes, 5).iter().all(|e| *e < 0.02));
    let bad = ablation(dir.path(), &["fd-run", "--grid", "9"]);
    assert_eq!(bad.status.code(), Some(2));
}
