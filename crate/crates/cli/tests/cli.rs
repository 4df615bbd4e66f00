use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_hspline");

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(BIN).args(args).env("HSPLINE_CACHE_DIR", cache).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

/// Parses the JSON report and validates it against the shipped schema.
fn json_report(o: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(&stdout(o)).expect("valid JSON");
    let s = schema();
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("schema violations: {msgs:?}");
    }
    v
}

fn num(v: &serde_json::Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn eval_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["eval", "--n", "1", "--point", "1,0.5,0.5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.7071067811865476\n");
    let o = run(&["eval", "--n", "2", "--point", "5,0.5,0"], dir.path());
    assert_eq!(stdout(&o), "0\n");
    let o = run(&["eval", "--n", "2", "--point", "1,0.5,0.25", "--format", "json"], dir.path());
    let v = json_report(&o);
    let row = &v["series"]["rows"][0];
    assert_eq!(num(&row[0]), 1.0);
    assert!(num(&row[3]) > 0.0);
}

#[test]
fn eval_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["eval", "--n", "2", "--point", "1.3,0.7,0.2", "--point", "2.5,1.5,1", "--format", "json"];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_numbers_carry_17_digits() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["eval", "--n", "1", "--point", "1,0.5,0.5", "--format", "json"], dir.path());
    assert!(stdout(&o).contains("7.0710678118654757e-1"), "{}", stdout(&o));
}

#[test]
fn grid_cache_round_trip_and_stale_version() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["eval", "--n", "1", "--grid-shape", "5,4,3", "--format", "csv"];
    let first = run(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(String::from_utf8_lossy(&first.stderr).contains("cache written"));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    let bytes = std::fs::read(&files[0]).unwrap();
    let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
    let header: serde_json::Value = serde_json::from_slice(&bytes[..nl]).unwrap();
    assert_eq!(header["version"], 1);
    assert_eq!(bytes.len() - nl - 1, 8 * 5 * 4 * 3);

    let second = run(&args, dir.path());
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout(&second).lines().count(), 1 + 60);

    // same bytes with an older version field
    let mut h = header.clone();
    h["version"] = 0.into();
    let mut stale = serde_json::to_vec(&h).unwrap();
    stale.extend_from_slice(&bytes[nl..]);
    std::fs::write(&files[0], stale).unwrap();
    let third = run(&args, dir.path());
    assert_eq!(third.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&third.stderr).contains("version"));
    let refreshed = run(&["eval", "--n", "1", "--grid-shape", "5,4,3", "--format", "csv", "--refresh-cache"], dir.path());
    assert_eq!(refreshed.status.code(), Some(0));
    assert_eq!(refreshed.stdout, first.stdout);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"format": "json", "n": 1}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "eval", "--n", "2", "--point", "1,0.5,0.5", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_report(&o);
    assert_eq!(v["target"], "phi1");
    std::fs::write(&cfg, r#"{"colour": "blue"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "verify", "integrals"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"r_tol": -1}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "verify", "integrals"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["eval", "--n", "1"],
        vec!["eval", "--n", "9", "--point", "0,0,0"],
        vec!["eval", "--n", "1", "--point", "1,2"],
        vec!["riesz"],
        vec!["riesz", "--separable", "C3"],
        vec!["dual"],
        vec!["verify", "bogus"],
    ] {
        let o = run(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "integrals", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_report(&o);
    assert!((num(&v["checks"][0]["measured"]) - std::f64::consts::SQRT_2).abs() == 0.0);
    assert!((num(&v["checks"][1]["measured"]) - 2.0).abs() < 1e-6);

    let o = run(&["verify", "orthonormality", "--window", "1", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(num(&json_report(&o)["checks"][0]["measured"]) <= 1e-8);

    let o = run(&["verify", "nonsymmetry", "--n", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));

    let o = run(&["verify", "periodization", "--n", "1", "--points", "5", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("name,expected,measured,tolerance,relation,pass\n"));
}

#[test]
fn vector_field_forms() {
    let dir = tempfile::tempdir().unwrap();
    let printed = run(&["verify", "vector-fields", "--points", "3"], dir.path());
    assert_eq!(printed.status.code(), Some(1));
    assert!(stdout(&printed).contains("PASS T"));
    let chain = run(&["verify", "vector-fields", "--points", "3", "--form", "chain-rule"], dir.path());
    assert_eq!(chain.status.code(), Some(0), "{}", stdout(&chain));
}

#[test]
fn riesz_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["riesz", "--separable", "B2", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_report(&o);
    assert!((num(&v["values"]["A"]) - 2.0 / 3.0).abs() < 1e-6);
    assert!((num(&v["values"]["B"]) - 2.0).abs() < 1e-6);

    let o = run(&["riesz", "--separable", "B3", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("lambda,symbol\n"));
    assert_eq!(out.lines().count(), 101);

    let o = run(&["riesz", "--psi-min", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_report(&o);
    assert!((num(&v["checks"][0]["measured"]) - 0.762714).abs() < 1e-4);

    let o = run(&["riesz", "--chi", "3", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_report(&o);
    assert!((num(&v["values"]["min p - A_p"]) - 0.638135).abs() < 1e-4);
}

#[test]
fn dual_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dual", "--separable", "B3", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_report(&o);
    assert!((num(&v["values"]["d(0,0,0)"]) - 46.5).abs() < 1e-9);
    assert!((num(&v["values"]["d(0,0,-1)"]) + 19.5).abs() < 1e-9);
    assert!((num(&v["values"]["d(0,0,-2)"]) - 34.5).abs() < 1e-9);
    for row in v["series"]["rows"].as_array().unwrap() {
        let t = num(&row[0]);
        assert!((num(&row[1]) - 1.5 * (40.0 * t * t - 36.0 * t + 5.0)).abs() < 1e-8);
    }

    let o = run(&["dual", "--phi", "1", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json_report(&o);
    assert!((num(&v["values"]["d(0,0,0)"]) - 1.0).abs() < 1e-12);

    let o = run(&["dual", "--separable", "B3", "--perturb", "0.1", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let v = json_report(&o);
    assert_eq!(v["pass"], false);
    assert!(num(&v["checks"][0]["measured"]) >= 0.01);
}
