use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_browselab"))
}

fn write(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn run(args: &[&str], input: Option<&Path>) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    if let Some(p) = input {
        cmd.arg("--input").arg(p);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn geometric_attention() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"relevance":{"grades":[1,0,1]}}"#);
    let out = run(
        &["attention", "--preset", "geometric", "--lambda", "0.8"],
        Some(&input),
    );
    let v = json(&out);
    let examine = floats(&v["examine"]);
    for (got, want) in examine.iter().zip([1.0, 0.8, 0.64]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["layout"]["kind"], "linear_vertical");
}

#[test]
fn attention_writes_output_file() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"relevance":{"grades":[1,0]}}"#);
    let target = dir.path().join("out.json");
    let out = bin()
        .args(["attention", "--preset", "geometric", "--lambda", "0.5"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(floats(&v["examine"]), vec![1.0, 0.5]);
}

#[test]
fn invalid_alpha_is_rejected_with_name_and_range() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"relevance":{"grades":[1,0,1]},
            "model":{"selection":{"mode":"constant","psi":0.2},"abandon":{"alpha":1.5}}}"#,
    );
    let out = run(&["attention"], Some(&input));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("abandon.alpha"), "{err}");
    assert!(err.contains("[0, 1)"), "{err}");
}

#[test]
fn all_hard_violations_are_listed() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"relevance":{"grades":[1,0,1]},
            "model":{"selection":{"mode":"constant","psi":-0.1},"abandon":{"alpha":1.5},
                     "grid":{"row_skip":2.0}}}"#,
    );
    let out = run(&["attention"], Some(&input));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 3, "{err}");
}

#[test]
#[allow(clippy::approx_constant)]
fn grid_attention_example() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"layout":{"kind":"wrapped_grid","rows":2,"cols":2},
            "relevance":{"grades":[0,0,0,0]},
            "model":{"selection":{"mode":"constant","psi":0.2},"grid":{"row_skip":0.3}}}"#,
    );
    let v = json(&run(&["attention"], Some(&input)));
    let examine = floats(&v["examine"]);
    assert!((examine[0] - 0.7).abs() < 1e-12);
    assert!((examine[2] - 0.5236).abs() < 1e-12);
    assert_eq!(floats(&v["per_row"]["skipped"]).len(), 2);
}

#[test]
fn paper_literal_row_skip_is_labelled() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"layout":{"kind":"wrapped_grid","rows":2,"cols":2},
            "relevance":{"grades":[0,0,0,0]},
            "model":{"selection":{"mode":"constant","psi":0.2},"grid":{"row_skip":0.3}}}"#,
    );
    let v = json(&run(
        &["attention", "--paper-literal", "row-skip"],
        Some(&input),
    ));
    assert_eq!(v["mode"], "paper_literal:row_skip");
    assert!(v["totals"].is_null());
    assert_eq!(floats(&v["examine"])[0], 1.0);
}

#[test]
fn metrics_examples() {
    let dir = TempDir::new().unwrap();
    let three = write(&dir, "a.json", r#"{"relevance":{"grades":[1,0,1]}}"#);
    let v = json(&run(&["metrics", "rbp", "--lambda", "0.5"], Some(&three)));
    assert!((v["value"].as_f64().unwrap() - 0.625).abs() < 1e-12);

    let one = write(&dir, "b.json", r#"{"relevance":{"grades":[1]}}"#);
    let v = json(&run(&["metrics", "err"], Some(&one)));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let out = run(&["metrics", "rbp", "--lambda", "1.5"], Some(&three));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn graded_rbp_needs_binarize() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"relevance":{"grades":[2,0,1],"g_max":2}}"#,
    );
    let out = run(&["metrics", "rbp", "--lambda", "0.5"], Some(&input));
    assert_eq!(out.status.code(), Some(2));
    let v = json(&run(
        &["metrics", "rbp", "--lambda", "0.5", "--binarize"],
        Some(&input),
    ));
    assert!((v["value"].as_f64().unwrap() - 0.625).abs() < 1e-12);
}

#[test]
fn exposure_needs_groups() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"relevance":{"grades":[1,0,1]}}"#);
    let out = run(
        &[
            "metrics",
            "exposure",
            "--preset",
            "geometric",
            "--lambda",
            "0.5",
        ],
        Some(&input),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exposure_sums_per_group() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"relevance":{"grades":[1,0,1]},"groups":{"1":"a","2":"b","3":"a"}}"#,
    );
    let v = json(&run(
        &[
            "metrics",
            "exposure",
            "--preset",
            "geometric",
            "--lambda",
            "0.5",
        ],
        Some(&input),
    ));
    assert!((v["value"]["a"].as_f64().unwrap() - 1.25).abs() < 1e-12);
    assert!((v["value"]["b"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

const GRID: &str = r#"{"layout":{"kind":"wrapped_grid","rows":2,"cols":3},
    "relevance":{"grades":[1,0,0,1,0,1]},
    "model":{"selection":{"mode":"binary","psi_rel":0.5,"psi_nonrel":0.2},
             "abandon":{"alpha":0.1},
             "grid":{"row_skip":0.3,"row_decay":{"mode":"rho","value":0.8},
                     "middle_bias":{"mode":"gaussian","sigma":1.5}}},
    "simulation":{"trials":100000,"seed":7}}"#;

#[test]
fn validate_passes_then_fails_when_perturbed() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", GRID);
    let out = run(&["validate"], Some(&input));
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["trials"], 100000);
    assert_eq!(v["seed"], 7);

    let out = run(&["validate", "--perturb", "0.05"], Some(&input));
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["failed"].as_u64().unwrap() > 0);
}

#[test]
fn validate_rejects_beta_boost() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"layout":{"kind":"wrapped_grid","rows":2,"cols":2},
            "relevance":{"grades":[0,0,0,0]},
            "model":{"selection":{"mode":"constant","psi":0.2},
                     "grid":{"row_decay":{"mode":"beta","value":1.5}}}}"#,
    );
    let out = run(&["validate", "--trials", "1000"], Some(&input));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("slower-decay"), "{err}");
}

#[test]
fn flags_override_file_model() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"relevance":{"grades":[0,0]},"model":{"selection":{"mode":"constant","psi":0.9}}}"#,
    );
    let v = json(&run(&["attention", "--psi", "0.5"], Some(&input)));
    assert_eq!(floats(&v["examine"]), vec![1.0, 0.5]);
}

#[test]
fn presets_list_and_show() {
    let v = json(&run(&["presets", "list"], None));
    let names: Vec<&str> = v["presets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"geometric"));
    assert!(names.contains(&"err_default"));

    let v = json(&run(
        &["presets", "show", "geometric", "--lambda", "0.8"],
        None,
    ));
    assert_eq!(v["config"]["selection"]["mode"], "constant");
    assert!((v["config"]["selection"]["psi"].as_f64().unwrap() - 0.2).abs() < 1e-12);

    let out = run(&["presets", "show", "nosuch"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"relevance":{"grades":[1]},"lamda":0.5}"#,
    );
    let out = run(&["metrics", "err"], Some(&input));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn geometric_validate_passes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"relevance":{"grades":[1,0,1,0,0]}}"#);
    let out = run(
        &["validate", "--preset", "geometric", "--lambda", "0.8", "--trials", "200000"],
        Some(&input),
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn single_cell_layout() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"layout":{"kind":"wrapped_grid","rows":1,"cols":1},"relevance":{"grades":[1]},
            "model":{"selection":{"mode":"constant","psi":0.5}}}"#,
    );
    let v = json(&run(&["attention"], Some(&input)));
    assert_eq!(floats(&v["examine"]), vec![1.0]);
    assert_eq!(floats(&v["select"]), vec![0.5]);
}
