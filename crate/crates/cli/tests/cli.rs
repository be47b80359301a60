use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_germnorm");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn write_scalar_file(
    dir: &tempfile::TempDir,
    name: &str,
    cap: u32,
    f: impl Fn(u32) -> f64,
) -> String {
    let coeffs: Vec<Value> = (0..=cap)
        .map(|n| serde_json::json!({ "alpha": [n], "values": [f(n)] }))
        .collect();
    let file = serde_json::json!({
        "dim": 1,
        "order_cap": cap,
        "mode": "scalar",
        "coeffs": coeffs,
    });
    let path = dir.path().join(name);
    fs::write(&path, file.to_string()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn norm_of_cauchy_is_one() {
    let v = json(&run(&[
        "norm", "--family", "cauchy", "--params", "a=2", "--k", "1", "--N", "20",
    ]));
    assert!((v["magnitude"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["argmax_alpha"], serde_json::json!([0]));
    assert_eq!(v["heuristic_finite"]["1"], true);
}

#[test]
fn norm_of_polynomial_is_its_largest_coefficient() {
    let v = json(&run(&[
        "norm",
        "--family",
        "polynomial",
        "--params",
        "0=1,1=-7,3=2",
        "--k",
        "5",
        "--N",
        "6",
    ]));
    // c_0 = 1 - 7x + 2x^3 is -4 at x = 1; c_1 = -7 + 6x^2 gives only 7/5.
    assert!((v["magnitude"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(v["argmax_point"], 2);
}

#[test]
fn norm_of_geometric_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scalar_file(&dir, "geo.json", 10, |n| 3f64.powi(n as i32));
    let v = json(&run(&["norm", "--input", &path, "--k", "2"]));
    let want = 10.0 * 1.5f64.ln();
    assert!((v["log_value"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(v["argmax_alpha"], serde_json::json!([10]));
    assert_eq!(v["argmax_point"], Value::Null);

    // --N truncates the file.
    let v = json(&run(&["norm", "--input", &path, "--k", "2", "--N", "4"]));
    assert!((v["log_value"].as_f64().unwrap() - 4.0 * 1.5f64.ln()).abs() < 1e-12);
}

#[test]
fn zero_element_reports_null_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scalar_file(&dir, "zero.json", 3, |_| 0.0);
    let v = json(&run(&["norm", "--input", &path, "--k", "1"]));
    assert_eq!(v["log_value"], Value::Null);
    assert_eq!(v["magnitude"], Value::Null);
}

#[test]
fn delta_tables() {
    let rows = csv_rows(&run(&[
        "delta", "--eps", "1,1,1,1", "--N", "8", "--format", "csv",
    ]));
    assert_eq!(rows[0], ["n", "k", "delta_n", "log_delta_n"]);
    assert_eq!(rows.len(), 9);
    for row in &rows[1..] {
        let n: f64 = row[0].parse().unwrap();
        let delta: f64 = row[2].parse().unwrap();
        assert!((delta - 1.0 / n).abs() < 1e-15);
    }

    let v = json(&run(&["delta", "--eps", "2^-k", "--N", "8"]));
    assert_eq!(v["delta"]["jumps"], serde_json::json!([1, 3, 6]));
    assert_eq!(v["weight_bound"]["pass"], true);

    let v = json(&run(&["delta", "--eps", "1", "--N", "1"]));
    assert_eq!(v["delta"]["jumps"], serde_json::json!([1]));
    assert_eq!(v["delta"]["rows"][0]["delta_n"], 1.0);
}

#[test]
fn verify_examples() {
    let v = json(&run(&[
        "verify",
        "--eps",
        "1/k^2",
        "--samples",
        "1000",
        "--seed",
        "7",
        "--dim",
        "2",
        "--N",
        "20",
    ]));
    assert_eq!(v["passed"], 1000);
    assert_eq!(v["failed"], 0);

    let v = json(&run(&[
        "verify",
        "--eps",
        "1",
        "--samples",
        "1",
        "--element",
        "zero",
    ]));
    assert_eq!(v["passed"], 1);

    let v = json(&run(&[
        "verify",
        "--eps",
        "1",
        "--samples",
        "1",
        "--element",
        "boundary",
        "--mode",
        "scalar",
        "--N",
        "15",
    ]));
    assert_eq!(v["passed"], 1);
    assert!(v["worst_margin"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn verify_csv_has_one_row_per_sample() {
    let out = run(&[
        "verify",
        "--eps",
        "2^-k",
        "--samples",
        "5",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][0], "sample");
}

#[test]
fn growth_examples() {
    let v = json(&run(&[
        "growth", "--family", "cauchy", "--params", "a=3", "--N", "40", "--window", "10",
    ]));
    assert!((v["estimate"].as_f64().unwrap() - 0.5f64.ln()).abs() < 0.05);

    let rows = csv_rows(&run(&[
        "growth",
        "--family",
        "exponential",
        "--N",
        "20",
        "--format",
        "csv",
    ]));
    assert_eq!(rows[0], ["n", "s_n"]);
    let s: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(s[1..].windows(2).all(|w| w[1] < w[0]));

    let v = json(&run(&[
        "growth",
        "--family",
        "factorial_scalar",
        "--N",
        "40",
    ]));
    let flags = v["heuristic_finite"].as_object().unwrap();
    assert!(flags.values().all(|f| f == false));
}

#[test]
fn decompose_reports_blocks() {
    let v = json(&run(&[
        "decompose",
        "--family",
        "cauchy",
        "--params",
        "a=3",
        "--eps",
        "1",
        "--N",
        "10",
    ]));
    assert_eq!(v["reconstructs"], true);
    assert_eq!(v["shell_zero"], "absorbed");
    assert_eq!(v["certificate"]["pass"], true);
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 10);
    assert_eq!(blocks[0]["lo"], 0);
    assert_eq!(blocks[9]["hi"], 11);
}

#[test]
fn generated_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.json");
    let path = path.to_str().unwrap();
    let out = run(&[
        "generate",
        "--family",
        "exponential",
        "--dim",
        "2",
        "--N",
        "5",
        "--output",
        path,
    ]);
    assert!(out.status.success());
    let file: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(file["family"]["kind"], "exponential");
    assert_eq!(file["mode"], "germ");

    let from_file = json(&run(&["norm", "--input", path, "--k", "2"]));
    let direct = json(&run(&[
        "norm",
        "--family",
        "exponential",
        "--dim",
        "2",
        "--N",
        "5",
        "--k",
        "2",
    ]));
    assert_eq!(from_file["log_value"], direct["log_value"]);
}

#[test]
fn exit_code_two_for_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let bad = bad.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["norm", "--input", bad],
        vec!["norm", "--input", "/nonexistent/file.json"],
        vec!["delta", "--eps", "0,1", "--N", "3"],
        vec!["delta", "--eps", "1/j", "--N", "3"],
        vec!["norm", "--family", "nope"],
        vec!["norm", "--family", "cauchy", "--params", "b=2"],
        vec![
            "growth", "--family", "cauchy", "--params", "a=2", "--N", "5", "--window", "9",
        ],
        vec!["norm"],
        vec!["verify", "--eps", "1", "--samples", "0"],
    ];
    for args in cases {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exit_code_three_for_shape_violations() {
    let dir = tempfile::tempdir().unwrap();
    // alpha [4] exceeds order_cap 2.
    let out_of_range = dir.path().join("range.json");
    fs::write(
        &out_of_range,
        r#"{"dim":1,"order_cap":2,"mode":"scalar","coeffs":[
            {"alpha":[0],"values":[1]},{"alpha":[1],"values":[1]},
            {"alpha":[2],"values":[1]},{"alpha":[4],"values":[1]}]}"#,
    )
    .unwrap();
    let incomplete = dir.path().join("incomplete.json");
    fs::write(
        &incomplete,
        r#"{"dim":1,"order_cap":2,"mode":"scalar","coeffs":[{"alpha":[0],"values":[1]}]}"#,
    )
    .unwrap();
    let missing_grid = dir.path().join("grid.json");
    fs::write(
        &missing_grid,
        r#"{"dim":1,"order_cap":0,"mode":"germ","coeffs":[{"alpha":[0],"values":[1]}]}"#,
    )
    .unwrap();
    let geo = write_scalar_file(&dir, "geo.json", 4, f64::from);
    let cases: Vec<Vec<&str>> = vec![
        vec!["norm", "--input", out_of_range.to_str().unwrap()],
        vec!["norm", "--input", incomplete.to_str().unwrap()],
        vec!["norm", "--input", missing_grid.to_str().unwrap()],
        vec!["norm", "--input", &geo, "--N", "9"],
        vec!["norm", "--input", &geo, "--dim", "2"],
        vec!["norm", "--family", "cauchy", "--params", "a=0.5"],
    ];
    for args in cases {
        assert_eq!(run(&args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "verify",
        "--eps",
        "2^-k",
        "--samples",
        "50",
        "--seed",
        "3",
        "--dim",
        "3",
        "--N",
        "10",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other_seed = [
        "verify",
        "--eps",
        "2^-k",
        "--samples",
        "50",
        "--seed",
        "4",
        "--dim",
        "3",
        "--N",
        "10",
        "--format",
        "csv",
    ];
    let seed_three = [
        "verify",
        "--eps",
        "2^-k",
        "--samples",
        "50",
        "--seed",
        "3",
        "--dim",
        "3",
        "--N",
        "10",
        "--format",
        "csv",
    ];
    assert_ne!(run(&other_seed).stdout, run(&seed_three).stdout);
}
