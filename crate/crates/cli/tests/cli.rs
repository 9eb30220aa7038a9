use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn actuator(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actuator"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

/// Runs a JSON-producing command, asserts success and schema validity.
fn json(args: &[&str]) -> Value {
    let out = actuator(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let validator = schema();
    if let Err(e) = validator.validate(&v) {
        panic!("{args:?} violates the schema: {e}");
    }
    v
}

fn csv_rows(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let out = actuator(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn error_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error JSON on stderr")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn optimize_heat2() {
    let v = json(&["optimize", "--system", "heat", "--n", "2"]);
    let r = &v["result"];
    assert!((r["best_value"].as_f64().unwrap() - 0.2).abs() < 1e-6);
    let b: Vec<f64> = serde_json::from_value(r["best_b"].clone()).unwrap();
    assert!((b[0] * b[1] + 0.2).abs() < 1e-4);
    assert_eq!(r["orbit"].as_array().unwrap().len(), 4);
    assert_eq!(v["paper_reference"]["best_value"], 0.24913);
}

#[test]
fn optimize_is_reproducible() {
    let args = ["optimize", "--system", "heat", "--n", "2", "--seed", "7"];
    assert_eq!(without_timing(json(&args)), without_timing(json(&args)));
}

#[test]
fn optimize_advection_reports_reference() {
    let v = json(&["optimize", "--system", "advection-plus", "--n", "2"]);
    assert_eq!(v["paper_reference"]["best_value"], 0.32236);
    assert!(v["paper_reference"]["difference"].is_number());
}

#[test]
fn optimize_history_as_csv() {
    let (header, rows) = csv_rows(&["optimize", "--n", "2", "--format", "csv", "--gens", "20"]);
    assert_eq!(header, ["generation", "best_value"]);
    assert!(rows.len() >= 2 && rows.len() <= 21);
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
}

#[test]
fn optimize_custom_identity_has_no_controllable_direction() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "1,0,0\n0,1,0\n0,0,1").unwrap();
    let out = actuator(&["optimize", "--system", "custom", "--matrix", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["exit_code"], 2);
}

#[test]
fn custom_matrix_errors_are_config_errors() {
    let out = actuator(&["optimize", "--system", "custom", "--matrix", "/nonexistent/a.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "1,2,3\n4,5,6").unwrap();
    let out = actuator(&["optimize", "--matrix", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(error_json(&out)["error"]["message"].as_str().unwrap().contains("square"));
    let out = actuator(&["optimize", "--system", "custom"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_de_parameters_exit_1() {
    let out = actuator(&["optimize", "--pop", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"]["kind"], "invalid-input");
}

#[test]
fn sample_resolution_8_contains_the_axis() {
    let (header, rows) = csv_rows(&["sample", "--system", "heat", "--n", "2", "--resolution", "8"]);
    assert_eq!(header, ["theta", "b1", "b2", "lambda1"]);
    assert_eq!(rows.len(), 8);
    assert_eq!(&rows[0][..3], &[0.0, 1.0, 0.0]);
    assert!((rows[0][3] - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn sample_heat2_profile() {
    let (_, rows) = csv_rows(&["sample", "--n", "2", "--resolution", "3600"]);
    let max = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    assert!((max - 0.2).abs() < 1e-5, "{max}");
    for k in [1, 3, 5, 7] {
        // θ = kπ/4 are the non-controllable directions
        assert!(rows[450 * k][3].abs() < 1e-10, "{:?}", rows[450 * k]);
    }
}

#[test]
fn wave_sample_equals_heat_sample() {
    let (_, heat) = csv_rows(&["sample", "--system", "heat", "--n", "2", "--resolution", "360"]);
    let (_, wave) = csv_rows(&["sample", "--system", "wave", "--n", "2", "--resolution", "360"]);
    for (h, w) in heat.iter().zip(&wave) {
        assert_eq!(&h[..3], &w[..3]);
        assert!((h[3] - w[3]).abs() <= 1e-10);
    }
}

#[test]
fn grids_are_nested() {
    for n in ["2", "3"] {
        let (_, coarse) = csv_rows(&["sample", "--n", n, "--resolution", "12"]);
        let (_, fine) = csv_rows(&["sample", "--n", n, "--resolution", "24"]);
        let fine_index = |row: &[f64]| {
            if n == "2" {
                fine.iter().position(|f| f[0] == row[0])
            } else {
                fine.iter().position(|f| f[0] == row[0] && f[1] == row[1])
            }
        };
        for row in &coarse {
            let j = fine_index(row).expect("coarse point on the fine grid");
            let value = *row.last().unwrap();
            assert!((fine[j].last().unwrap() - value).abs() <= 1e-14);
        }
        let expected = if n == "2" { 12 } else { 144 };
        assert_eq!(coarse.len(), expected);
    }
}

#[test]
fn sample_grid_rejects_n4() {
    let out = actuator(&["sample", "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(error_json(&out)["error"]["message"].as_str().unwrap().contains("--mode random"));
    let (header, rows) = csv_rows(&["sample", "--n", "4", "--mode", "random", "--samples", "25"]);
    assert_eq!(header.len(), 6);
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| (r[1..5].iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12));
}

#[test]
fn sample_resolution_floor() {
    assert_eq!(actuator(&["sample", "--resolution", "7"]).status.code(), Some(1));
}

#[test]
fn sample_as_json() {
    let v = json(&["sample", "--n", "3", "--resolution", "8", "--format", "json"]);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 64);
}

#[test]
fn verify_passes_and_detects_corruption() {
    let v = json(&["verify"]);
    assert_eq!(v["result"]["passed"], true);
    let out = actuator(&["verify", "--corrupt-companion"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["suites"][0]["passed"], false);
}

#[test]
fn cost_bound_and_slope() {
    let v = json(&["cost", "--n", "2", "--samples", "50", "--T", "1"]);
    assert_eq!(v["result"]["all_bounds_hold"], true);
    assert!(v["result"]["ratio_max"].as_f64().unwrap() <= 1.0001);
    assert_eq!(v["result"]["blowup_exponent"], Value::Null);

    let v = json(&["cost", "--n", "2", "--samples", "1", "--T", "0.001,0.002,0.005,0.01"]);
    let slope = v["result"]["blowup_exponent"].as_f64().unwrap();
    assert!((slope + 1.5).abs() < 0.15, "{slope}");
}

#[test]
fn cost_of_the_companion_pair_is_tight() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "0,1\n-3,-4").unwrap();
    let path = f.path().to_str().unwrap();
    let v = json(&["cost", "--system", "custom", "--matrix", path, "--b", "0,1", "--T", "0.5,1"]);
    for row in v["result"]["rows"].as_array().unwrap() {
        assert!((row["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-8, "{row}");
    }
}

#[test]
fn cost_rejects_non_cyclic_actuator() {
    let out = actuator(&["cost", "--n", "2", "--b", "1,1", "--T", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["kind"], "non-controllable");
}

#[test]
fn cost_csv() {
    let (header, rows) = csv_rows(&["cost", "--n", "2", "--b", "1,0", "--T", "1", "--format", "csv"]);
    assert_eq!(header[..3], ["b1", "b2", "horizon"]);
    assert_eq!(rows.len(), 1);
    assert!((rows[0][3] - 2.004895291479284).abs() < 1e-8);
}

#[test]
fn spectrum_of_scaled_laplacian() {
    let v = json(&["spectrum", "--system", "heat", "--n", "10", "--scale", "h2"]);
    assert!(v["result"]["max_relative_error"].as_f64().unwrap() < 1e-8);
    let v = json(&["spectrum", "--n", "2", "--of", "gram", "--b", "1,0"]);
    let eig: Vec<f64> = serde_json::from_value(v["result"]["eigenvalues"].clone()).unwrap();
    assert!((eig[0] - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
    let out = actuator(&["spectrum", "--system", "advection-plus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = actuator(&["optimize", "--gens", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["command"], "optimize");
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |t: &str| without_timing(json(&["--threads", t, "optimize", "--n", "3", "--seed", "3"]));
    let one = run("1");
    assert_eq!(one, run("4"));
}
