use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_retrieval"))
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(input: &Path, extra: &[&str]) -> (Output, Value) {
    let out = bin().arg("--input").arg(input).args(extra).output().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out, report)
}

#[test]
fn report_header_and_digest() {
    let path = corpus("full-spark-triple-r2.json");
    let (out, r) = run(&path, &[]);
    assert!(out.status.success());
    assert_eq!(r["schema"], "1");
    assert_eq!(r["mode"], "exact");
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(r["input_sha256"], retrieval::runner::sha256_hex(&bytes));
    assert_eq!(r["summary"]["mismatches"], 0);
    let pr = &r["tasks"][1];
    assert_eq!(pr["task"], "pr");
    assert_eq!(pr["outcome"], "CertifiedYes");
    assert_eq!(pr["expectation"], "met");
}

#[test]
fn every_corpus_report_verifies() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let input = entry.unwrap().path();
        let stem = input.file_stem().unwrap().to_string_lossy().into_owned();
        let report = tmp(&format!("{stem}.report.json"));
        let status = bin()
            .arg("--input")
            .arg(&input)
            .arg("--output")
            .arg(&report)
            .status()
            .unwrap();
        assert!(status.success(), "{stem}: {status}");
        let out = bin()
            .arg("verify")
            .arg("--input")
            .arg(&input)
            .arg("--report")
            .arg(&report)
            .output()
            .unwrap();
        assert!(out.status.success(), "{stem}: {}", String::from_utf8_lossy(&out.stderr));
        seen += 1;
    }
    assert!(seen >= 26);
}

#[test]
fn tampered_certificates_are_rejected() {
    let input = corpus("fusion-counterexample.json");
    let (_, mut r) = run(&input, &[]);
    r["tasks"][0]["certificates"][0]["v_sq"] = serde_json::json!(["0", "1", "1"]);
    let report = write("tampered.json", &r.to_string());
    let out = bin()
        .arg("verify")
        .arg("--input")
        .arg(&input)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not verify"));

    let other = write("other-input.json", r#"{"frame":{"vectors":[["1"]]}}"#);
    let (_, good) = run(&input, &[]);
    let report = write("good.json", &good.to_string());
    let out = bin()
        .arg("verify")
        .arg("--input")
        .arg(&other)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest mismatch"));
}

#[test]
fn unmet_expectation_exits_2() {
    let p = write(
        "mismatch.json",
        r#"{"fusion":{"subspaces":[{"basis":[["0","1","0"],["0","0","1"]]},{"basis":[["1","0","0"],["0","0","1"]]}]},
            "tasks":[{"task":"fusion-nr","expect":"yes"}]}"#,
    );
    let (out, r) = run(&p, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(r["tasks"][0]["outcome"], "CertifiedNo");
    assert_eq!(r["tasks"][0]["expectation"], "mismatch");
}

#[test]
fn parse_errors_exit_3_with_location() {
    let p = write("bad.json", "{\n  \"frame\": {\"vectors\": [[\"1\", \"x\"]]}\n}");
    let (out, _) = run(&p, &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("$.frame.vectors[0][1]"), "{err}");

    let p = write("syntax.json", "{\n  \"tasks\": [\"nr\",\n");
    let (out, _) = run(&p, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let (out, _) = run(&tmp("does-not-exist.json"), &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn task_without_input_object_is_an_error() {
    let p = write("no-frame.json", r#"{"tasks":["pr"]}"#);
    let (out, r) = run(&p, &[]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(r["tasks"][0]["outcome"], "error");
    assert!(r["tasks"][0]["error"].as_str().unwrap().contains("frame"));
}

#[test]
fn flags_override_the_run_file() {
    let p = corpus("hyperplanes-r3.json");
    let (out, r) = run(&p, &["--trials", "50", "--seed", "9", "--max-subset-bits", "12"]);
    assert!(out.status.success());
    assert_eq!(r["trials"], 50);
    assert_eq!(r["seed"], 9);
    assert_eq!(r["max_subset_bits"], 12);
    assert_eq!(r["tasks"][0]["outcome"], "Undecided");
    // Targeted sparse patterns are tried before the random ones.
    assert_eq!(r["tasks"][0]["details"]["trials"], 50 + 7);
    assert!(!r["tasks"][0]["caveats"].as_array().unwrap().is_empty());

    let (_, r) = run(&p, &["--mode", "float", "--eps", "1e-6"]);
    assert_eq!(r["mode"], "float");
    assert_eq!(r["eps"], 1e-6);
}

#[test]
fn pretty_and_timings() {
    let p = corpus("indicator-gap-r4.json");
    let (out, r) = run(&p, &["--pretty", "--timings"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("fusion-nr"));
    assert!(text.contains("coordinate-row-space"), "{text}");
    assert!(r["tasks"][0]["timing_ms"].is_number());
    let (_, plain) = run(&p, &[]);
    assert!(plain["tasks"][0].get("timing_ms").is_none());
}

#[test]
fn exhaustive_yes_carries_caveat() {
    let p = corpus("orthonormal-r3.json");
    let (_, r) = run(&p, &[]);
    let nr = &r["tasks"][0];
    assert_eq!(nr["outcome"], "CertifiedYes");
    assert!(nr["caveats"][0].as_str().unwrap().contains("exhaustive"));
    let pr = &r["tasks"][1];
    assert_eq!(pr["outcome"], "CertifiedNo");
    assert_eq!(pr["certificates"][0]["kind"], "pr-fail");
}

#[test]
fn float_frame_input() {
    let p = write(
        "float.json",
        r#"{"mode":"float","eps":1e-9,"frame":{"vectors":[[1,0],[0.5,0.5],[0,1]]},"tasks":["pr","bounds"]}"#,
    );
    let (out, r) = run(&p, &[]);
    assert!(out.status.success());
    assert_eq!(r["tasks"][0]["outcome"], "CertifiedYes");
    let bounds = &r["tasks"][1]["details"]["frame"];
    assert!((bounds["lower"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{bounds}");
    assert!((bounds["upper"].as_f64().unwrap() - 1.5).abs() < 1e-9, "{bounds}");
}
