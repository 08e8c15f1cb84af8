//! End-to-end tests of the `gharmonics` binary: config validation, exit
//! codes, the synth→decompose round trip, and byte-determinism of CSV
//! output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gharmonics")
}

fn run_with(config: &serde_json::Value, dir: &Path, extra: &[&str]) -> (Output, PathBuf) {
    let config_path = dir.join("job.json");
    std::fs::write(&config_path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    let out = Command::new(bin())
        .arg("--config")
        .arg(&config_path)
        .args(extra)
        .output()
        .expect("spawn gharmonics");
    (out, config_path)
}

fn base_config(command: &str) -> serde_json::Value {
    serde_json::json!({
        "schema": "gharmonics/1",
        "command": command,
        "params": {"s": [0.0, 0.0], "t": [0.0, 0.0], "r": [0.0, 0.0]},
    })
}

#[test]
fn rejects_malformed_config_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = Command::new(bin())
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn rejects_wrong_schema_and_missing_sections() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config("verify");
    cfg["schema"] = serde_json::json!("gharmonics/999");
    let (out, _) = run_with(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));

    // verify without grid/modes.
    let cfg = base_config("verify");
    let (out, _) = run_with(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("verify needs"), "stderr: {msg}");
}

#[test]
fn algebra_bracket_of_laplacian_and_z_del() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config("algebra");
    cfg["op"] = serde_json::json!("bracket");
    cfg["elements"] = serde_json::json!([
        {"ident": [0,0], "z_del": [0,0], "zbar_delbar": [0,0], "del_delbar": [1,0]},
        {"ident": [0,0], "z_del": [1,0], "zbar_delbar": [0,0], "del_delbar": [0,0]},
    ]);
    let (out, _) = run_with(&cfg, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["gamma"], serde_json::json!([1.0, 0.0]));
    assert_eq!(
        doc["result"]["element"]["del_delbar"],
        serde_json::json!([1.0, 0.0])
    );
    assert_eq!(
        doc["result"]["element"]["ident"],
        serde_json::json!([0.0, 0.0])
    );
}

#[test]
fn synth_decompose_round_trip_reproduces_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let samples_path = dir.path().join("samples.csv");

    let mut synth = base_config("synth");
    synth["params"] = serde_json::json!({"s": [0.4, 0.1], "t": [-0.2, 0.3], "r": [0.5, -0.1]});
    synth["modes"] = serde_json::json!([
        {"m": -7, "k": [0.3, -0.4]},
        {"m": -1, "k": [1.0, 0.25]},
        {"m": 0, "k": [0.9, 0.0]},
        {"m": 4, "k": [-0.6, 0.8]},
        {"m": 12, "k": [0.05, 0.7]},
    ]);
    synth["circle"] = serde_json::json!({"rho": 0.5, "n": 256});
    synth["io"] = serde_json::json!({"output": samples_path, "format": "csv"});
    let (out, _) = run_with(&synth, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // Manifest written next to the samples.
    let manifest_path = dir.path().join("samples.csv.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["circle"]["n"], 256);

    let mut decompose = base_config("decompose");
    decompose["params"] = synth["params"].clone();
    decompose["m_range"] = serde_json::json!([-16, 16]);
    decompose["io"] = serde_json::json!({"input": samples_path});
    let (out, _) = run_with(&decompose, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    let recovered: Vec<(i64, f64, f64)> = doc["modes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| {
            (
                m["m"].as_i64().unwrap(),
                m["k"][0].as_f64().unwrap(),
                m["k"][1].as_f64().unwrap(),
            )
        })
        .collect();
    for entry in manifest["modes"].as_array().unwrap() {
        let m = entry["m"].as_i64().unwrap();
        let kre = entry["k"][0].as_f64().unwrap();
        let kim = entry["k"][1].as_f64().unwrap();
        let (_, gre, gim) = *recovered.iter().find(|(rm, _, _)| *rm == m).unwrap();
        let err = ((gre - kre).powi(2) + (gim - kim).powi(2)).sqrt();
        assert!(err < 1e-10, "mode {m}: err {err:e}");
    }
    // Modes absent from the manifest come back as (numerical) zero.
    for (m, re, im) in &recovered {
        if !manifest["modes"]
            .as_array()
            .unwrap()
            .iter()
            .any(|e| e["m"].as_i64().unwrap() == *m)
        {
            assert!(
                (re.powi(2) + im.powi(2)).sqrt() < 1e-10,
                "mode {m} not zero"
            );
        }
    }
}

#[test]
fn synth_csv_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut synth = base_config("synth");
    synth["params"] = serde_json::json!({"s": [0.3, -0.2], "t": [0.1, 0.4], "r": [-0.5, 0.6]});
    synth["modes"] = serde_json::json!([
        {"m": -3, "k": [0.7, 0.1]},
        {"m": 2, "k": [0.2, -0.9]},
    ]);
    synth["circle"] = serde_json::json!({"rho": 0.45, "n": 64});

    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    for (path, _) in [(&path_a, 0), (&path_b, 1)] {
        let (out, _) = run_with(
            &synth,
            dir.path(),
            &["--out", path.to_str().unwrap(), "--format", "csv"],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&path_a).unwrap();
    let b = std::fs::read(&path_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    // 17 significant digits per float field.
    let text = String::from_utf8(a).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.split(',').all(|f| f.contains('e')), "row: {row}");
}

#[test]
fn synth_over_a_grid_and_eval_share_the_point_layout() {
    let dir = tempfile::tempdir().unwrap();
    let grid = serde_json::json!({"radius": 0.6, "n": 9, "exclude_origin_radius": 0.0});

    let mut synth = base_config("synth");
    synth["params"] = serde_json::json!({"s": [0.2, 0.0], "t": [0.1, 0.0], "r": [0.4, 0.0]});
    synth["modes"] = serde_json::json!([{"m": 1, "k": [1.0, 0.0]}]);
    synth["grid"] = grid.clone();
    let (out, _) = run_with(&synth, dir.path(), &["--format", "csv"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "re_z,im_z,re_u,im_u");
    let synth_rows = text.lines().count() - 1;
    assert!(synth_rows > 40, "only {synth_rows} grid points");

    let mut eval = base_config("eval");
    eval["params"] = synth["params"].clone();
    eval["mode_index"] = serde_json::json!(1);
    eval["grid"] = grid;
    let (out, _) = run_with(&eval, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), synth_rows);

    // Omitting the origin exclusion defaults it to twice the stencil step,
    // which drops the origin grid point here.
    eval["grid"] = serde_json::json!({"radius": 0.6, "n": 9});
    let (out, _) = run_with(&eval, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), synth_rows - 1);

    // An out-of-range grid radius is a configuration error.
    eval["grid"] = serde_json::json!({"radius": 1.5, "n": 9});
    let (out, _) = run_with(&eval, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decompose_emits_csv_mode_table_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let samples_path = dir.path().join("s.csv");
    let mut synth = base_config("synth");
    synth["modes"] = serde_json::json!([{"m": 2, "k": [0.5, -0.5]}]);
    synth["circle"] = serde_json::json!({"rho": 0.5, "n": 64});
    synth["io"] = serde_json::json!({"output": samples_path, "format": "csv"});
    let (out, _) = run_with(&synth, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));

    let mut decompose = base_config("decompose");
    decompose["m_range"] = serde_json::json!([0, 4]);
    decompose["io"] = serde_json::json!({"input": samples_path, "format": "csv"});
    let (out, _) = run_with(&decompose, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m,re_k,im_k");
    let row2: Vec<&str> = lines.nth(2).unwrap().split(',').collect();
    assert_eq!(row2[0], "2");
    assert!((row2[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    assert!((row2[2].parse::<f64>().unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn verify_exit_codes_follow_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let mut verify = base_config("verify");
    // Laplace parameters with the mode z^2: residual is stencil-exact small.
    verify["modes"] = serde_json::json!([{"m": 2, "k": [1.0, 0.0]}]);
    verify["grid"] = serde_json::json!({"radius": 0.8, "n": 21, "exclude_origin_radius": 0.002});
    let report_path = dir.path().join("report.json");
    let (out, _) = run_with(
        &verify,
        dir.path(),
        &["--out", report_path.to_str().unwrap()],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(doc["pass"], serde_json::json!(true));
    assert!(doc["report"]["max_abs"].as_f64().unwrap() < 1e-4);
    assert!(doc["report"]["points_checked"].as_u64().unwrap() > 300);

    // An absurd threshold flips the exit code to 2 (and pass to false).
    verify["threshold"] = serde_json::json!(1e-30);
    let (out, _) = run_with(&verify, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], serde_json::json!(false));
}

#[test]
fn limit_table_is_strictly_decreasing_for_canonical_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let mut limit = base_config("limit");
    limit["params"] = serde_json::json!({"s": [1.0, 0.0], "t": [0.0, 0.0], "r": [0.0, 0.0]});
    limit["m_values"] = serde_json::json!([2, 20, 200]);
    let (out, _) = run_with(&limit, dir.path(), &["--format", "csv"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let gaps: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn eval_reports_collapsed_kernels_consistently() {
    let dir = tempfile::tempdir().unwrap();
    let mut eval = base_config("eval");
    // Bessel regime s + t = 0: the phi column falls back to the kernel value
    // and theta must agree with it.
    eval["params"] = serde_json::json!({"s": [0.5, 0.2], "t": [-0.5, -0.2], "r": [0.3, 0.0]});
    eval["mode_index"] = serde_json::json!(3);
    eval["points"] = serde_json::json!([[0.25, 0.1], [-0.4, 0.3]]);
    let (out, _) = run_with(&eval, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in doc["rows"].as_array().unwrap() {
        let p = (row["p"][0].as_f64().unwrap(), row["p"][1].as_f64().unwrap());
        let phi = (
            row["phi"][0].as_f64().unwrap(),
            row["phi"][1].as_f64().unwrap(),
        );
        let th = (
            row["theta"][0].as_f64().unwrap(),
            row["theta"][1].as_f64().unwrap(),
        );
        assert_eq!(p, phi);
        // theta is evaluated at (r+sm)z with argument z, while p is the
        // radial kernel at the same z; in this regime they coincide.
        let err = ((p.0 - th.0).powi(2) + (p.1 - th.1).powi(2)).sqrt();
        assert!(err < 1e-11, "{err:e}");
    }
}

#[test]
fn cli_overrides_reach_the_series_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut eval = base_config("eval");
    eval["params"] = serde_json::json!({"s": [1.0, 0.0], "t": [1.0, 0.0], "r": [1.0, 0.0]});
    eval["points"] = serde_json::json!([[1.9, 0.0]]);
    // A term budget of 3 cannot certify the tail at z = 1.9.
    let (out, _) = run_with(&eval, dir.path(), &["--max-terms", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("did not converge"), "stderr: {msg}");
    // The default budget succeeds.
    let (out, _) = run_with(&eval, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
}
