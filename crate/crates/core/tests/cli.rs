use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rse-lab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn without_timing(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_seconds");
    v
}

#[test]
fn list_is_alphabetical() {
    let out = lab(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter(|l| !l.starts_with(' ')).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for n in ["complementarity", "gw_graviton", "convergence_commutator"] {
        assert!(names.contains(&n));
    }
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "scenario = \"complementarity\"\n[physics]\nomega_2 = 2.0\n");
    let out = lab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omega_2"));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_config_is_an_io_error() {
    let out = lab(&["run", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn module_error_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // k = 1.5 does not fit the periodic domain
    let cfg = write(dir.path(), "k.toml", "scenario = \"complementarity\"\n[field]\nk = 1.5\n");
    let out = lab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("complementarity"));
}

#[test]
fn reports_are_deterministic_and_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scenario = \"complementarity\"\n");
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    let csv = dir.path().join("csv");
    let out = lab(&["run", &cfg, "--report", r1.to_str().unwrap(), "--csv-dir", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = lab(&["run", &cfg, "--report", r2.to_str().unwrap(), "--csv-dir", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let mut a = without_timing(&r1);
    let b = without_timing(&r2);
    // only the echoed report path differs between the two runs
    a["config"]["output"]["report_path"] = b["config"]["output"]["report_path"].clone();
    assert_eq!(a, b);
    assert_eq!(a["schema_version"], 1);
    assert_eq!(a["passed"], true);
    let energy = a["expectations"]["energy"].as_f64().unwrap();
    assert!((energy - 1.0).abs() < 1e-8);

    let field = fs::read_to_string(csv.join("field.csv")).unwrap();
    assert!(field.starts_with("x,re,im\n"));
    assert_eq!(field.lines().count(), 257);
    let q = fs::read_to_string(csv.join("quantum_potential.csv")).unwrap();
    assert!(q.starts_with("x,value\n"));
}

#[test]
fn stdout_report_when_no_path_given() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "h.toml", "scenario = \"gw_helicity\"\n");
    let out = lab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scenario"], "gw_helicity");
}

#[test]
fn failing_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "conv.toml", "scenario = \"convergence_commutator\"\n");
    let out = lab(&["run", &cfg, "--tolerance-scale", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    let cfg = write(
        dir.path(),
        "tight.toml",
        "scenario = \"convergence_commutator\"\n[run.tolerances]\nratio_deviation_max = 1e-9\n",
    );
    assert_eq!(lab(&["run", &cfg]).status.code(), Some(1));
}

#[test]
fn batch_reports_every_config_and_worst_status() {
    let dir = tempfile::tempdir().unwrap();
    let configs = dir.path().join("configs");
    fs::create_dir(&configs).unwrap();
    write(&configs, "a.toml", "scenario = \"gw_helicity\"\n");
    write(&configs, "b.toml", "scenario = \"tt_gauge_suite\"\n");
    let reports = dir.path().join("reports");
    let out = lab(&["batch", configs.to_str().unwrap(), "--report", reports.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(reports.join("a.json").exists() && reports.join("b.json").exists());

    write(&configs, "c.toml", "scenario = \"gw_helicity\"\ntypo = 1\n");
    let out = lab(&["batch", configs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
