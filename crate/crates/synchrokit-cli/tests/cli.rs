//! End-to-end tests of the `synchrokit` binary: payload schemas, golden
//! outputs, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const AM1_JSON: &str = r#"{"n":5,"letters":["a","b","w0","w1"],"delta":[[4,1,0,1],[3,0,0,1],[2,4,2,2],[1,3,3,3],[0,2,4,4]]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_synchrokit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON payload")
}

fn write_am1(dir: &Path) -> String {
    let path = dir.join("am1.json");
    std::fs::write(&path, AM1_JSON).unwrap();
    path.to_string_lossy().into_owned()
}

fn write_cycle(dir: &Path) -> String {
    let path = dir.join("cycle3.json");
    std::fs::write(&path, r#"{"n":3,"letters":["r"],"delta":[[1],[2],[0]]}"#).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn series_emits_the_golden_dfa() {
    let output = run(&["series", "am", "--m", "1"]);
    assert!(output.status.success());
    assert_eq!(String::from_utf8_lossy(&output.stdout).trim(), AM1_JSON);

    let word = run(&["series", "am", "--m", "1", "--emit", "resetword"]);
    assert_eq!(
        String::from_utf8_lossy(&word.stdout).trim(),
        "w1 a b w0 a b w1 a b a w0"
    );
    let body = run(&["series", "am", "--m", "1", "--emit", "word"]);
    assert_eq!(
        String::from_utf8_lossy(&body.stdout).trim(),
        "w1 a b w0 a b w1 a b a"
    );
}

#[test]
fn series_cerny_emits_only_the_dfa() {
    let output = run(&["series", "cerny", "--n", "4"]);
    let parsed = stdout_json(&output);
    assert_eq!(parsed["n"], 4);
    let refused = run(&["series", "cerny", "--n", "4", "--emit", "word"]);
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn rt_reports_threshold_and_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_am1(dir.path());

    let plain = stdout_json(&run(&["rt", &path]));
    assert_eq!(plain["threshold"], 11);
    assert_eq!(plain["q0"], 0);
    assert_eq!(plain["word"], "w1 a b w0 a b w1 a b a w0");
    assert_eq!(plain["verified"], Value::Null);

    let verified = stdout_json(&run(&["rt", &path, "--verify"]));
    assert_eq!(verified["verified"], true);
}

#[test]
fn rt_cross_checks_the_second_member() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("am2.json");
    let emitted = run(&["series", "am", "--m", "2"]);
    std::fs::write(&path, &emitted.stdout).unwrap();
    let report = stdout_json(&run(&["rt", path.to_str().unwrap(), "--verify"]));
    assert_eq!(report["threshold"], 39);
    assert_eq!(report["verified"], true);
}

#[test]
fn rt_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = write_cycle(dir.path());
    assert_eq!(run(&["rt", &cycle]).status.code(), Some(3));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not a dfa").unwrap();
    assert_eq!(
        run(&["rt", garbage.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["rt", dir.path().join("missing.json").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_word_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_am1(dir.path());

    let good = stdout_json(&run(&["verify-word", &path, "w1 a b w0 a b w1 a b a w0"]));
    assert_eq!(good["reset"], true);
    assert_eq!(good["q0"], 0);
    assert_eq!(good["length"], 11);
    assert_eq!(good["straight"], true);
    assert_eq!(good["greedy"], true);
    assert_eq!(good["factors"]["alpha_alpha"], false);
    assert_eq!(good["factors"]["omega0_beta"], false);
    assert_eq!(good["factors"]["final_letter"], "w0");

    let not_reset = stdout_json(&run(&["verify-word", &path, "w0 w0"]));
    assert_eq!(not_reset["reset"], false);
    assert_eq!(not_reset["q0"], Value::Null);

    let empty = stdout_json(&run(&["verify-word", &path, ""]));
    assert_eq!(empty["reset"], false);
    assert_eq!(empty["length"], 0);

    let unknown = run(&["verify-word", &path, "a z"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn verify_word_compact_parsing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cerny4.json");
    let cerny = run(&["series", "cerny", "--n", "4"]);
    std::fs::write(&path, &cerny.stdout).unwrap();
    let report = stdout_json(&run(&[
        "verify-word",
        path.to_str().unwrap(),
        "abbbabbba",
        "--compact",
    ]));
    assert_eq!(report["reset"], true);
    assert_eq!(report["length"], 9);
    // the factor report needs the quaternary letter names
    assert_eq!(report["factors"], Value::Null);
}

#[test]
fn extend_lengths_and_domain_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_am1(dir.path());

    let pair = stdout_json(&run(&["extend", &path, "--subset", "0,1"]));
    assert_eq!(pair["length"], 4);
    assert_eq!(pair["word"], "w1 a b a");

    assert_eq!(
        run(&["extend", &path, "--subset", ""]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["extend", &path, "--subset", "0,1,2,3,4"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["extend", &path, "--subset", "9"]).status.code(),
        Some(2)
    );
}

#[test]
fn trace_emits_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_am1(dir.path());
    let chain = stdout_json(&run(&["trace", &path, "--word", "a b a w0", "--q0", "0"]));
    let rows = chain["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["subset"], serde_json::json!([0]));
    assert_eq!(rows[1]["subset"], serde_json::json!([0, 1]));
    assert_eq!(rows[4]["subset"], serde_json::json!([1, 2]));
    assert_eq!(rows[0]["extenders"], serde_json::json!(["w0"]));
}

#[test]
fn levels_reports_the_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_am1(dir.path());
    let profile = stdout_json(&run(&["levels", &path, "--q0", "0"]));
    assert_eq!(profile["depth_to_full"], 11);
    assert_eq!(profile["widths"][0], 1);
    let truncated = stdout_json(&run(&["levels", &path, "--q0", "0", "--max-depth", "0"]));
    assert_eq!(truncated["widths"], serde_json::json!([1]));
    assert_eq!(truncated["depth_to_full"], Value::Null);
}

#[test]
fn census_csv_bounds_and_witnesses() {
    let output = run(&[
        "census",
        "--n",
        "3",
        "--k",
        "2",
        "--eulerian",
        "--iso",
        "--bound",
        "auto",
    ]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    let mut lines = text.trim().lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,k,total,synchronizing,max_rt,bound,bound_holds"
    );
    assert_eq!(lines.next().unwrap(), "3,2,90,5,2,2,true");

    let dir = tempfile::tempdir().unwrap();
    let witness_dir = dir.path().join("witnesses");
    let json = stdout_json(&run(&[
        "census",
        "--n",
        "3",
        "--k",
        "2",
        "--eulerian",
        "--iso",
        "--out",
        "json",
        "--witness-dir",
        witness_dir.to_str().unwrap(),
    ]));
    assert_eq!(json["max_rt"], 2);
    assert_eq!(json["witness_classes"], 5);
    let mut files: Vec<_> = std::fs::read_dir(&witness_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 5);
    let first = std::fs::read_to_string(&files[0]).unwrap();
    let witness: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(witness["n"], 3);
}

#[test]
fn census_binary_five_states_golden_row() {
    let output = run(&[
        "census",
        "--n",
        "5",
        "--k",
        "2",
        "--eulerian",
        "--bound",
        "auto",
    ]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert_eq!(
        text.trim().lines().last().unwrap(),
        "5,2,113400,86880,10,10,true"
    );
}

#[test]
fn census_violated_bound_exits_1() {
    let output = run(&[
        "census",
        "--n",
        "2",
        "--k",
        "2",
        "--eulerian",
        "--bound",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("2,2,6,2,1,0,false"), "payload was: {text}");
}

#[test]
fn census_budget_env_override() {
    let output = bin()
        .args(["census", "--n", "3", "--k", "2", "--eulerian"])
        .env("SYNCHROKIT_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let forced = bin()
        .args(["census", "--n", "3", "--k", "2", "--eulerian", "--force"])
        .env("SYNCHROKIT_BUDGET", "10")
        .output()
        .unwrap();
    assert!(forced.status.success());
}

#[test]
fn check_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_am1(dir.path());
    let report = stdout_json(&run(&["check", &path]));
    assert_eq!(report["eulerian"], true);
    assert_eq!(report["classes"][0]["involutory"], true);
    assert_eq!(report["classes"][2]["unitary"], true);
    assert_eq!(report["classes"][2]["moved"], serde_json::json!([1, 0]));

    let cycle = write_cycle(dir.path());
    let cycle_report = stdout_json(&run(&["check", &cycle]));
    assert_eq!(cycle_report["eulerian"], true);

    let cerny = run(&["series", "cerny", "--n", "4"]);
    let cerny_path = dir.path().join("cerny4.json");
    std::fs::write(&cerny_path, &cerny.stdout).unwrap();
    let cerny_report = stdout_json(&run(&["check", cerny_path.to_str().unwrap()]));
    assert_eq!(cerny_report["eulerian"], false);
}

#[test]
fn dfa_files_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_am1(dir.path());
    // parse -> serialize through the census witness path must preserve bytes
    let emitted = run(&["series", "am", "--m", "1"]);
    assert_eq!(
        String::from_utf8_lossy(&emitted.stdout).trim(),
        std::fs::read_to_string(&path).unwrap()
    );
}
