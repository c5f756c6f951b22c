use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cyclide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclide"))
        .args(args)
        .env_remove("CYCLIDE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn error_json(out: &Output, code: i32) -> Value {
    assert_eq!(out.status.code(), Some(code), "stdout: {}", String::from_utf8_lossy(&out.stdout));
    serde_json::from_slice(&out.stderr).expect("json on stderr")
}

#[test]
fn coords_of_the_origin() {
    let v = json(&cyclide(&["coords", "to", "--a", "0,1,2,3", "--point", "0,0,0"]));
    assert_eq!(v["s"], serde_json::json!([1.0, 2.0, 3.0]));
}

#[test]
fn coords_round_trip() {
    let v = json(&cyclide(&["coords", "from", "--s", "0.5,1.5,2.5", "--sheet", "9"]));
    let p: Vec<String> = v["p"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap().to_string()).collect();
    let v = json(&cyclide(&["coords", "to", "--point", &p.join(",")]));
    let s: Vec<f64> = v["s"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (got, want) in s.iter().zip([0.5, 1.5, 2.5]) {
        assert!((got - want).abs() < 1e-10);
    }
}

#[test]
fn omega_at_the_left_end() {
    let v = json(&cyclide(&["omega", "--a", "0,1,2,3", "--at", "0"]));
    assert_eq!(v["Omega"].as_f64(), Some(0.0));
    let t = json(&cyclide(&["omega", "--at", "1.7"]))["Omega"].as_f64().unwrap();
    let s = json(&cyclide(&["omega", "--inverse", &t.to_string()]))["phi"].as_f64().unwrap();
    assert!((s - 1.7).abs() < 1e-9);
}

#[test]
fn ground_state_eigenpair() {
    let v = json(&cyclide(&["eigen", "--kind", "I", "--n", "0,0", "--parity", "000", "--a", "0,1,2,3"]));
    assert_eq!(v["zero_counts"], serde_json::json!([0, 0]));
    assert!((v["norm_check"].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert!(v["lambda1"].is_number() && v["lambda2"].is_number());
    assert_eq!(v["residuals"].as_array().unwrap().len(), 2);
}

#[test]
fn batch_table_is_sorted_and_deterministic() {
    let args = ["eigen", "--kind", "III", "--batch", "3,3", "--parity", "010"];
    let first = cyclide(&args);
    assert!(first.status.success());
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n_a,n_b,parity,lambda1,lambda2"));
    let keys: Vec<(usize, usize)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[5], f[0], "zero count matches n_a");
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(keys.len(), 16);
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(cyclide(&args).stdout, first.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["frobnicate"],
        vec!["coords", "to", "--point", "1,2"],
        vec!["coords", "to", "--point", "0,0,0", "--unknown-flag"],
        vec!["coords", "to", "--point", "0,0,0", "--a", "0,2,1,3"],
        vec!["eigen", "--kind", "I", "--n", "0,0", "--parity", "01"],
        vec!["solve", "--region", "first", "--d", "0.5", "--boundary", "nonsense", "--N", "2"],
    ] {
        let e = error_json(&cyclide(&args), 2);
        assert!(e["error"]["message"].is_string(), "{args:?}");
    }
}

#[test]
fn numerical_errors_exit_with_three() {
    let e = error_json(&cyclide(&["omega", "--at", "4"]), 3);
    assert_eq!(e["error"]["kind"], "domain");
    let e = error_json(&cyclide(&["surface", "--index", "1", "--d", "1.0"]), 3);
    assert_eq!(e["error"]["kind"], "degenerate_surface");
}

#[test]
fn config_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("conf.json");
    std::fs::write(&conf, r#"{"a":[0,1,2,4],"format":"csv"}"#).unwrap();
    let conf = conf.to_str().unwrap();
    let v = json(&cyclide(&["coords", "to", "--config", conf, "--point", "0,0,0"]));
    assert_eq!(v["s"], serde_json::json!([1.0, 2.0, 4.0]));
    // flags win over the file
    let v = json(&cyclide(&["coords", "to", "--config", conf, "--a", "0,1,2,3", "--point", "0,0,0"]));
    assert_eq!(v["s"][2].as_f64(), Some(3.0));
    let out = dir.path().join("eig.csv");
    let r = cyclide(&["eigen", "--config", conf, "--kind", "I", "--n", "1,0", "--out", out.to_str().unwrap()]);
    assert!(r.status.success() && r.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("n_a,n_b,"));
    std::fs::write(dir.path().join("bad.json"), r#"{"colour":"red"}"#).unwrap();
    let bad = dir.path().join("bad.json");
    error_json(&cyclide(&["omega", "--at", "0", "--config", bad.to_str().unwrap()]), 2);
}

#[test]
fn cache_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cyclide"))
            .args(["omega", "--at", "2.5"])
            .env("CYCLIDE_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = run();
    assert_eq!(json(&first), json(&second));
    assert_eq!(json(&first), json(&cyclide(&["omega", "--at", "2.5"])));
}

fn write_points(dir: &Path) -> String {
    let path = dir.join("pts.csv");
    std::fs::write(&path, "x,y,z\n0.1,0.2,0.3\n-0.2,0.3,-0.1\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn harmonic_values_and_laplacian_report() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write_points(dir.path());
    let out = cyclide(&["harmonic", "eval", "--kind", "I", "--n", "1,1", "--parity", "100", "--points", &pts]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,y,z,G,flagged");
    assert_eq!(rows.len(), 3);
    let g1: f64 = rows[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!(g1.abs() > 0.0);
    let v = json(&cyclide(&["verify", "--laplacian", "--kind", "II", "--n", "1,0", "--samples", "4"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(v["second_order"], Value::Bool(true));
    let out = cyclide(&["harmonic", "eval", "--kind", "III", "--n", "0,0", "--points", &pts]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn surface_samples() {
    let out = cyclide(&["surface", "--index", "1", "--d", "0.5", "--res", "4,5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 16 * 20);
    let v = json(&cyclide(&["surface", "--index", "2", "--d", "1.5", "--res", "2,2", "--format", "json"]));
    assert_eq!(v.as_array().unwrap().len(), 64);
    assert!(v[0]["sheet"].is_number());
}

#[test]
fn point_source_solve_with_check() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("field.csv");
    let v = json(&cyclide(&[
        "solve", "--region", "first", "--d", "0.5", "--boundary", "builtin:point-source", "--at", "5,5,5", "--N", "3",
        "--check", "--field", field.to_str().unwrap(), "--field-res", "5",
    ]));
    assert_eq!(v["N"], 3);
    assert_eq!(v["terms"].as_array().unwrap().len(), 8 * 9);
    let l2: Vec<f64> = v["check"]["boundary_l2"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["error"].as_f64().unwrap())
        .collect();
    assert_eq!(l2.len(), 5);
    assert!(l2.windows(2).all(|w| w[1] < w[0]), "{l2:?}");
    assert!(v["check"]["interior_error"].as_f64().unwrap() < 1e-4);
    assert!(v["diagnostics"]["parseval_ratio"].as_f64().unwrap() > 0.99);
    let text = std::fs::read_to_string(field).unwrap();
    assert!(text.starts_with("x,y,z,u\n") && text.lines().count() > 1);
}

#[test]
fn grid_boundary_solve() {
    let dir = tempfile::tempdir().unwrap();
    // constant data on every sheet of the third kind
    let mut csv = String::from("sheet,ta,tb,e\n");
    for sheet in [0, 1, 2, 3, 8, 9, 10, 11] {
        for ta in [-10.0, 10.0] {
            for tb in [-10.0, 10.0] {
                csv.push_str(&format!("{sheet},{ta},{tb},1\n"));
            }
        }
    }
    let path = dir.path().join("grid.csv");
    std::fs::write(&path, csv).unwrap();
    let spec = format!("grid:{}", path.display());
    let v = json(&cyclide(&["solve", "--region", "third", "--d", "2.5", "--boundary", &spec, "--N", "2"]));
    let terms = v["terms"].as_array().unwrap();
    let energy: f64 = terms.iter().map(|t| t["coeff"].as_f64().unwrap().powi(2)).sum();
    assert!(energy > 0.0);
    // reflection-even data; the inversion bit mixes through the (ρ²+1)^{1/2} weight
    for t in terms {
        if !t["parity"].as_str().unwrap().ends_with("00") {
            assert!(t["coeff"].as_f64().unwrap().abs() < 1e-12);
        }
    }
    let missing = format!("grid:{}", dir.path().join("nope.csv").display());
    error_json(&cyclide(&["solve", "--region", "third", "--d", "2.5", "--boundary", &missing, "--N", "2"]), 2);
}
