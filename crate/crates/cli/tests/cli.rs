use std::fs;
use std::process::{Command, Output};

use portrait_growth::series::GrowthSeries;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_portrait-growth")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

fn value(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("json output")
}

/// Parses a `{"value", "radius"}` pair into `(lo, hi)` floats.
fn bracket(v: &serde_json::Value) -> (f64, f64) {
    let m: f64 = v["value"].as_str().unwrap().parse().unwrap();
    let r: f64 = v["radius"].as_str().unwrap().parse().unwrap();
    (m - r, m + r)
}

#[test]
fn growth_tables() {
    let o = run(&["growth", "--group", "grigorchuk", "--n", "3", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,a_n,digits\n0,5,1\n1,16,2\n2,68,2\n3,1160,4\n");
    assert!(stderr(&o).contains("projected memory"));

    let o = run(&["growth", "--group", "ggs", "--p", "3", "--e", "1,2", "--n", "2", "--format", "text"]);
    assert!(stdout(&o).contains("a_1 = 27") && stdout(&o).contains("a_2 = 2187"));

    let o = run(&["growth", "--group", "apollonian", "--n", "1"]);
    assert_eq!(stdout(&o), "n,a_n,digits\n0,7,1\n1,1029,4\n");
}

#[test]
fn engines_agree_and_json_round_trips() {
    let a = run(&["growth", "--group", "grigorchuk", "--n", "6", "--format", "json"]);
    let b = run(&["growth", "--group", "grigorchuk", "--n", "6", "--format", "json", "--engine", "generic"]);
    let sa = GrowthSeries::from_json(&stdout(&a)).unwrap();
    let sb = GrowthSeries::from_json(&stdout(&b)).unwrap();
    assert_eq!(sa.totals, sb.totals);
    assert_eq!(sa.per_coset, sb.per_coset);
}

#[test]
fn gamma_grigorchuk() {
    let o = run(&["gamma", "--group", "grigorchuk", "--n", "10", "--format", "json"]);
    assert!(o.status.success());
    let v = value(&o);
    assert_eq!(v["bounds"], "proven");
    assert_eq!(v["all_verified"], true);
    let (lo, hi) = bracket(&v["gamma"]);
    assert!(hi - lo <= 2.0 * 4f64.ln() / 1024.0 + 1e-12);
    assert!(lo <= 0.72 && hi >= 0.70);
    let (mlo, mhi) = bracket(&v["M"]);
    assert!(mlo <= 4f64.ln() && 4f64.ln() <= mhi);
}

#[test]
fn gamma_apollonian_limit() {
    let o = run(&["gamma", "--group", "apollonian", "--n", "5", "--format", "json"]);
    assert!(o.status.success());
    let v = value(&o);
    let (lo, hi) = bracket(&v["gamma"]);
    let target = 7f64.ln() + 3f64.ln() / 2.0;
    assert!(lo - 1e-12 <= target && target <= hi + 1e-12, "{lo} {hi}");
}

#[test]
fn gamma_short_prefix_notes_low_precision() {
    let o = run(&["gamma", "--group", "grigorchuk", "--n", "1"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("low-precision"));
}

#[test]
fn gamma_precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_portrait-growth"))
        .args(["gamma", "--group", "grigorchuk", "--n", "4", "--format", "json"])
        .env("PORTRAIT_GROWTH_PRECISION", "96")
        .output()
        .unwrap();
    assert_eq!(value(&o)["precision_bits"], 96);
    let o = Command::new(env!("CARGO_BIN_EXE_portrait-growth"))
        .args(["gamma", "--group", "grigorchuk", "--n", "12"])
        .env("PORTRAIT_GROWTH_PRECISION", "4")
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(stderr(&o).contains("insufficient"));
}

#[test]
fn verify_reports() {
    let o = run(&["verify", "--group", "grigorchuk", "--oracle-depth", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v = value(&o);
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["detail"].as_str().unwrap().contains("5, 16, 68")));

    let o = run(&["verify", "--group", "apollonian", "--table"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("24/24"));

    let o = run(&["verify", "--group", "ggs", "--p", "3", "--e", "1,2"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn symmetric_vectors_are_refused() {
    let o = run(&["verify", "--group", "ggs", "--p", "3", "--e", "1,1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("symmetric"));
}

#[test]
fn portraits() {
    let o = run(&["portrait", "--group", "grigorchuk", "bacac"]);
    assert!(stdout(&o).starts_with("depth 3\n"));
    let o = run(&["portrait", "--group", "grigorchuk", "d"]);
    assert_eq!(stdout(&o), "depth 0\nd\n");
    let o = run(&["portrait", "--group", "apollonian", "xyz", "--format", "dot"]);
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with("//")).collect();
    assert_eq!(body.first(), Some(&"digraph portrait {"));
    assert_eq!(body.last(), Some(&"}"));
    let nodes = body.iter().filter(|l| l.contains("[label=") && !l.contains("->")).count();
    let edges = body.iter().filter(|l| l.contains("->")).count();
    assert_eq!(edges + 1, nodes);
    let o = run(&["portrait", "--group", "grigorchuk", "q"]);
    assert!(!o.status.success());
}

#[test]
fn census_with_cosets() {
    let o = run(&["census", "--group", "grigorchuk", "--n", "2", "--cosets"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("n,a_n,p_n(1),"));
    assert!(lines[3].starts_with("2,68,"));
    assert!(lines[3].ends_with(",true"));
}

#[test]
fn user_defined_group_through_files() {
    let dir = std::env::temp_dir().join(format!("portrait-growth-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("spec.json");
    let bd = dir.join("branch.json");
    fs::write(&spec, stdout(&run(&["spec", "--group", "grigorchuk"]))).unwrap();
    fs::write(&bd, stdout(&run(&["branch-data", "--group", "grigorchuk"]))).unwrap();
    let (s, b) = (spec.to_str().unwrap(), bd.to_str().unwrap());
    let o = run(&["growth", "--spec", s, "--branch-data", b, "--n", "3"]);
    assert_eq!(stdout(&o), "n,a_n,digits\n0,5,1\n1,16,2\n2,68,2\n3,1160,4\n");
    let o = run(&["verify", "--spec", s, "--branch-data", b, "--oracle-depth", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    fs::remove_dir_all(&dir).unwrap();
}
