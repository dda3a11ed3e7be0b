//! End-to-end tests of the `autoseq` binary: exit codes, the expand
//! contract, JSON report shape, and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_autoseq"))
}

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_str(&stdout_str(out)).expect("stdout parses as JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process not killed by signal")
}

#[test]
fn expand_prints_the_thue_morse_prefix() {
    let out = run(&["expand", "--morphism", &fixture("tm.morph"), "--length", "16"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_str(&out).trim(), "0110100110010110");
}

#[test]
fn expand_prints_the_fibonacci_prefix() {
    let out = run(&["expand", "--morphism", &fixture("fib.morph"), "--length", "8"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_str(&out).trim(), "01001010");
}

#[test]
fn expand_length_zero_prints_nothing() {
    let out = run(&["expand", "--morphism", &fixture("tm.morph"), "--length", "0"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_morphism_file_is_an_input_error() {
    let out = run(&["analyze", "--morphism", "definitely-missing.morph"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn input_sources_are_mutually_exclusive_and_required() {
    let out = run(&["analyze"]);
    assert_eq!(code(&out), 2);
    let out = run(&[
        "analyze",
        "--morphism",
        &fixture("fib.morph"),
        "--seq",
        "liouville",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_generator_is_an_input_error() {
    let out = run(&["analyze", "--seq", "nope:1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn analyze_fibonacci_emits_a_certified_negative_verdict() {
    let out = run(&[
        "analyze",
        "--morphism",
        &fixture("fib.morph"),
        "--prefix-len",
        "32768",
        "--json",
        "-",
    ]);
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    assert_eq!(report["schema"], "autoseq-report-v1");
    assert_eq!(report["verdict"]["conclusion"]["kind"], "not-automatic-any");
    assert_eq!(report["verdict"]["certified"], true);
    assert_eq!(report["input"]["kind"], "morphism");
}

#[test]
fn analyze_squares_reports_advisory_evidence() {
    let out = run(&[
        "analyze",
        "--seq",
        "poly:1,0,0",
        "--bases",
        "2,3",
        "--json",
        "-",
    ]);
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    assert_eq!(report["verdict"]["conclusion"]["kind"], "not-automatic-any");
    assert_eq!(report["verdict"]["certified"], false);
    let tags: Vec<&str> = report["verdict"]["evidence"]
        .as_array()
        .expect("evidence array")
        .iter()
        .map(|e| e["tag"].as_str().expect("tag"))
        .collect();
    assert!(tags.contains(&"polynomial-gap"), "tags: {tags:?}");
    assert!(tags.contains(&"gap-dichotomy"), "tags: {tags:?}");
}

#[test]
fn kernel_family_counts_eight_distinct_members() {
    let out = run(&[
        "kernel",
        "--morphism",
        &fixture("aab.morph"),
        "--q",
        "2",
        "--family",
        "qk-k",
        "--kmax",
        "8",
        "--json",
        "-",
    ]);
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    let fam = &report["payloads"]["kernel_families"][0];
    assert_eq!(fam["family"], "q^k-k");
    assert_eq!(fam["estimate"]["distinct_classes"], 8);
    // Fragment reports carry no verdict.
    assert!(report["verdict"].is_null());
}

#[test]
fn complexity_table_matches_the_sturmian_formula() {
    let out = run(&[
        "complexity",
        "--morphism",
        &fixture("fib.morph"),
        "--nmax",
        "30",
        "--horizon",
        "65536",
        "--json",
        "-",
    ]);
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    let p = report["payloads"]["complexity"]["p"]
        .as_array()
        .expect("p table");
    for n in 1..=30usize {
        assert_eq!(p[n].as_u64(), Some(n as u64 + 1), "p({n})");
    }
    assert_eq!(report["payloads"]["complexity"]["growth"], "linear");
}

#[test]
fn dynamics_reports_the_residue_stall_for_base_two() {
    let out = run(&[
        "dynamics",
        "--morphism",
        &fixture("m211.morph"),
        "--json",
        "-",
    ]);
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    let obs = &report["payloads"]["obstruction"];
    assert_eq!(obs["all_q_obstructed"], true);
    let per_q = obs["per_q"].as_array().expect("per_q array");
    let q2 = per_q
        .iter()
        .find(|e| e["q"] == 2)
        .expect("q=2 entry present");
    assert_eq!(q2["obstructed"], true);
    assert_eq!(q2["reason"], "residue-stall");
    assert_eq!(q2["prime"], 2);
    assert_eq!(q2["j"], 0);
}

#[test]
fn gaps_flags_the_squares_dichotomy_failure() {
    let out = run(&[
        "gaps",
        "--seq",
        "poly:1,0,0",
        "--symbol",
        "1",
        "--horizon",
        "1048576",
        "--json",
        "-",
    ]);
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    assert_eq!(
        report["payloads"]["gap_verdicts"][0]["outcome"],
        "fails-both"
    );
    assert_eq!(
        report["payloads"]["ratio_verdicts"][0]["outcome"],
        "tends-to-one"
    );
}

#[test]
fn gaps_rejects_symbols_outside_the_alphabet() {
    let out = run(&["gaps", "--seq", "poly:1,0,0", "--symbol", "7"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_deterministic_modulo_timings() {
    let args = [
        "analyze",
        "--morphism",
        &fixture("aab.morph"),
        "--prefix-len",
        "65536",
        "--json",
        "-",
    ];
    let mut first = json_stdout(&run(&args));
    let mut second = json_stdout(&run(&args));
    for report in [&mut first, &mut second] {
        let timings = report["timings"].as_object_mut().expect("timings object");
        for v in timings.values_mut() {
            *v = Value::from(0.0);
        }
    }
    assert_eq!(first, second);
}

#[test]
fn a_periodic_prefix_file_is_recognized() {
    let dir = std::env::temp_dir();
    let path = dir.join("autoseq-cli-test-periodic.txt");
    let mut text = String::from("0001");
    for _ in 0..20000 {
        text.push_str("10");
    }
    std::fs::write(&path, text).expect("temp file written");
    let out = run(&[
        "analyze",
        "--prefix",
        path.to_str().expect("utf-8 temp path"),
        "--json",
        "-",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code(&out), 0);
    let report = json_stdout(&out);
    let conclusion = &report["verdict"]["conclusion"];
    assert_eq!(conclusion["kind"], "ultimately-periodic");
    assert_eq!(conclusion["preperiod"], 4);
    assert_eq!(conclusion["period"], 2);
}

#[test]
fn a_too_short_input_hits_the_internal_limit_code() {
    let out = run(&[
        "analyze",
        "--seq",
        "liouville",
        "--prefix-len",
        "1000",
        "--json",
        "-",
    ]);
    assert_eq!(code(&out), 3);
    // The limit is still reported inside a well-formed report.
    let report = json_stdout(&out);
    assert_eq!(report["verdict"]["conclusion"]["kind"], "inconclusive");
    let diags = report["verdict"]["diagnostics"]
        .as_array()
        .expect("diagnostics");
    assert!(
        diags.iter().any(|d| d.as_str().unwrap_or("").contains("internal limit")),
        "diagnostics: {diags:?}"
    );
}

#[test]
fn json_can_be_written_to_a_file() {
    let dir = std::env::temp_dir();
    let path = dir.join("autoseq-cli-test-report.json");
    let out = run(&[
        "analyze",
        "--morphism",
        &fixture("tm.morph"),
        "--prefix-len",
        "32768",
        "--json",
        path.to_str().expect("utf-8 temp path"),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).expect("report file written");
    std::fs::remove_file(&path).ok();
    let report: Value = serde_json::from_str(&text).expect("file parses");
    assert_eq!(report["verdict"]["conclusion"]["kind"], "candidate-automatic");
    assert_eq!(report["verdict"]["conclusion"]["base"], 2);
    assert_eq!(report["verdict"]["conclusion"]["construction_certified"], true);
    assert_eq!(report["payloads"]["dfao_states"], 2);
}
