use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qot(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qot"))
        .args(args)
        .current_dir(dir)
        .env_remove("QOT_OUTPUT_DIR")
        .output()
        .expect("qot runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn printed(out: &Output, key: &str) -> String {
    let prefix = format!("{key} = ");
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("{key} missing from {}", stdout(out)))
}

fn report_path(out: &Output) -> String {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix("report: ").map(str::to_string))
        .expect("report path printed")
}

fn read_json(dir: &Path, path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(path)).unwrap()).unwrap()
}

fn row_value(report: &Value, key: &str) -> f64 {
    report["rows"][0]["values"][key].as_f64().unwrap_or_else(|| panic!("{key}"))
}

#[test]
fn ot_run_examples() {
    let dir = TempDir::new().unwrap();
    let out = qot(dir.path(), &["ot", "run", "--a0", "1", "--a1", "0", "--i", "1", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    assert_eq!(printed(&out, "bob_output"), "0");
    let path = dir.path().join("ot-run-a0_1-a1_0-i_1-seed7.json");
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["transcript"]["bob_output"], 0);

    let out = qot(dir.path(), &["ot", "run", "--a0", "1", "--a1", "1", "--i", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(printed(&out, "bob_output"), "1");
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["ot", "run", "--a0", "1", "--a1", "0"][..],
        &["ot", "run", "--a0", "2", "--a1", "0", "--i", "0"],
        &["attack", "--role", "alice", "--epsilon", "1.5"],
        &["attack", "--role", "bob", "--epsilon", "0"],
        &["attack", "--role", "carol", "--epsilon", "0.04"],
        &["attack", "--role", "alice", "--epsilon", "0.04", "--trials", "0"],
        &["qbc", "run", "--b", "0", "--bob-flip-open", "--alice-attack", "0.04"],
        &["verify", "lemma3"],
        &["verify", "sealing", "--epsilon-grid", "0.04,1.2"],
        &["--format", "xml", "verify", "sealing"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&qot(dir.path(), args)), 2, "{args:?}");
    }
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn unwritable_output_exits_three() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    let out = qot(dir.path(), &["--output", "blocker/report.json", "verify", "sealing"]);
    assert_eq!(code(&out), 3);
    let out = qot(dir.path(), &["--output-dir", "blocker", "ot", "run", "--a0", "0", "--a1", "1", "--i", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn alice_attack_meets_its_witness() {
    let dir = TempDir::new().unwrap();
    let out = qot(dir.path(), &["attack", "--role", "alice", "--epsilon", "0.04", "--trials", "20000"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = read_json(dir.path(), &report_path(&out));
    assert!(row_value(&report, "alice_advantage") >= 0.04);
    assert!((row_value(&report, "bob_error") - 0.02).abs() < 1e-9);
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn bob_attack_below_witness_is_a_violation() {
    let dir = TempDir::new().unwrap();
    let out = qot(dir.path(), &["attack", "--role", "bob", "--epsilon", "0.04", "--trials", "20000"]);
    assert_eq!(code(&out), 1);
    let report = read_json(dir.path(), &report_path(&out));
    // √ε / (4√2) at ε = 0.04.
    assert!((row_value(&report, "a1_advantage") - 0.035355339059327376).abs() < 1e-9);
    assert!((row_value(&report, "witness_bound") - 0.08).abs() < 1e-12);
    let violations = report["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1);
    assert!(violations[0].as_str().unwrap().contains("witness"));
    assert!(stdout(&out).contains("violation: "));
}

#[test]
fn verify_examples() {
    let dir = TempDir::new().unwrap();
    let out = qot(dir.path(), &["verify", "lemma1", "--family-size", "200", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let report = read_json(dir.path(), &report_path(&out));
    assert_eq!(report["rows"].as_array().unwrap().len(), 4 * 204);

    let out = qot(dir.path(), &["verify", "lemma2", "--family-size", "20"]);
    assert_eq!(code(&out), 0);

    let out = qot(dir.path(), &["verify", "lambda", "--family-size", "100"]);
    assert_eq!(code(&out), 0);
    let lambda: f64 = printed(&out, "lambda_est").split(' ').next().unwrap().parse().unwrap();
    assert!(lambda > 0.0 && lambda <= 0.5);
    assert!(stdout(&out).contains("empirical estimate"));

    let out = qot(
        dir.path(),
        &["--format", "csv", "verify", "sealing", "--epsilon-grid", "0.01,0.04,0.09"],
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join(report_path(&out))).unwrap();
    let header = csv.lines().next().unwrap();
    for col in ["margin_4sqrt_eps", "margin_4sqrt_2eps", "quadratic_margin", "tool_version", "config"] {
        assert!(header.split(',').any(|c| c == col), "{col} in {header}");
    }
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn qbc_examples() {
    let dir = TempDir::new().unwrap();
    let out = qot(dir.path(), &["qbc", "run", "--b", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(printed(&out, "opened"), "1");
    assert_eq!(printed(&out, "sealing_test"), "Pass");
    assert_eq!(printed(&out, "binding_test"), "Pass");

    let out = qot(dir.path(), &["qbc", "run", "--b", "0", "--bob-flip-open", "--trials", "20000"]);
    assert_eq!(code(&out), 0);
    let report = read_json(dir.path(), &report_path(&out));
    assert!((row_value(&report, "q_err") - 0.5).abs() < 1e-12);
    let f = row_value(&report, "mc_alice_err");
    assert!((f - 0.5).abs() <= 4.0 * row_value(&report, "mc_alice_err_sigma"));
    assert!(report["first_transcript"].is_object());

    let out = qot(dir.path(), &["qbc", "run", "--b", "0", "--alice-attack", "0.04", "--trials", "20000"]);
    assert_eq!(code(&out), 0);
    let report = read_json(dir.path(), &report_path(&out));
    assert!((row_value(&report, "bob_detection") - 0.01).abs() < 1e-9);
    let f = row_value(&report, "mc_bob_err");
    assert!((f - 0.01).abs() <= 4.0 * row_value(&report, "mc_bob_err_sigma"));
}

#[test]
fn identical_runs_write_identical_reports() {
    let dir = TempDir::new().unwrap();
    let runs: [&[&str]; 3] = [
        &["attack", "--role", "alice", "--epsilon", "0.09", "--trials", "5000", "--seed", "3"],
        &["--format", "csv", "verify", "lambda", "--family-size", "10", "--seed", "4"],
        &["qbc", "run", "--b", "1", "--trials", "500", "--seed", "5"],
    ];
    for args in runs {
        let path = report_path(&qot(dir.path(), args));
        let first = fs::read(dir.path().join(&path)).unwrap();
        assert_eq!(report_path(&qot(dir.path(), args)), path);
        assert_eq!(fs::read(dir.path().join(&path)).unwrap(), first, "{args:?}");
    }
    let a = report_path(&qot(dir.path(), &["qbc", "run", "--b", "1", "--trials", "500", "--seed", "6"]));
    let b = report_path(&qot(dir.path(), &["qbc", "run", "--b", "1", "--trials", "500", "--seed", "5"]));
    assert_ne!(fs::read(dir.path().join(a)).unwrap(), fs::read(dir.path().join(b)).unwrap());
}

#[test]
fn output_dir_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("reports/nested");
    let out = Command::new(env!("CARGO_BIN_EXE_qot"))
        .args(["verify", "sealing"])
        .current_dir(dir.path())
        .env("QOT_OUTPUT_DIR", &target)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(target.join("verify-sealing-seed1.json").is_file());

    let explicit = dir.path().join("explicit.json");
    let out = Command::new(env!("CARGO_BIN_EXE_qot"))
        .args(["--output", explicit.to_str().unwrap(), "verify", "sealing"])
        .env("QOT_OUTPUT_DIR", &target)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(explicit.is_file());
}

#[test]
fn json_reports_carry_config_and_version() {
    let dir = TempDir::new().unwrap();
    let out = qot(dir.path(), &["verify", "sealing", "--epsilon-grid", "0.04"]);
    let report = read_json(dir.path(), &report_path(&out));
    for key in ["config", "rows", "violations", "tool", "version"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert_eq!(report["tool"], "qot");
    assert_eq!(report["config"]["command"], "verify sealing");
    assert_eq!(report["config"]["epsilon_grid"], serde_json::json!([0.04]));
    assert_eq!(report["config"]["output_format"], "json");
}
