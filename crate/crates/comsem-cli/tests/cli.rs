//! End-to-end runs of the `comsem` binary: exit codes, output formats,
//! bundle files, and replay round trips.

use std::path::{Path, PathBuf};
use std::process::Output;

use comsem::{
    deserialize_bundle, BundleItem, Certificate, FitOutcome, FittedFunction, MeaningValue,
};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_comsem")
}

fn demo(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../demos")
        .join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = std::process::Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs");
    (
        status.code().expect("no signal"),
        String::from_utf8(stdout).expect("utf8 stdout"),
        String::from_utf8(stderr).expect("utf8 stderr"),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn encode_verifies_the_idiom_language() {
    let spec = demo("idioms.spec.json");
    let (code, stdout, _) = run(&["encode", path(&spec)]);
    assert_eq!(code, 0);
    assert!(stdout.contains("PASS"), "stdout: {stdout}");
    assert!(stdout.contains("0 violation(s)"), "stdout: {stdout}");
}

#[test]
fn encode_with_table_prints_every_equation() {
    let spec = demo("coordination.spec.json");
    let (code, stdout, _) = run(&["encode", path(&spec), "--table"]);
    assert_eq!(code, 0);
    // 11 expressions, one equation each; the marker is every base key.
    assert!(stdout.matches("mu(").count() > 11, "stdout: {stdout}");
    assert!(stdout.contains("<$,"), "dollar base keys: {stdout}");
}

#[test]
fn encode_machine_output_is_a_bundle() {
    let spec = demo("idioms.spec.json");
    let (code, stdout, _) = run(&["--format", "machine", "encode", path(&spec)]);
    assert_eq!(code, 0);
    let bundle = deserialize_bundle(stdout.trim().as_bytes()).expect("machine output parses");
    assert!(bundle
        .items
        .iter()
        .any(|i| matches!(i, BundleItem::Report(r) if r.passed())));
}

#[test]
fn encode_bundle_replays_against_its_spec() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("encode.bundle.json");
    let spec = demo("idioms.spec.json");
    let (code, _, _) = run(&["--out", path(&bundle), "encode", path(&spec)]);
    assert_eq!(code, 0);
    let (code, stdout, _) = run(&["replay", path(&bundle), "--spec", path(&spec)]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("replay OK"), "stdout: {stdout}");
}

#[test]
fn replay_rejects_the_wrong_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("encode.bundle.json");
    let (code, _, _) = run(&["--out", path(&bundle), "encode", path(&demo("idioms.spec.json"))]);
    assert_eq!(code, 0);
    let other = demo("coordination.spec.json");
    let (code, _, stderr) = run(&["replay", path(&bundle), "--spec", path(&other)]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("digest"), "stderr: {stderr}");
}

#[test]
fn replay_detects_tampered_results() {
    let dir = tempfile::tempdir().unwrap();
    let bundle_path = dir.path().join("fit.bundle.json");
    let samples = demo("nd-samples.json");
    let (code, _, _) = run(&["--out", path(&bundle_path), "fit", path(&samples)]);
    assert_eq!(code, 0);
    let doctored = std::fs::read_to_string(&bundle_path)
        .unwrap()
        .replacen("\"10\"", "\"9\"", 1);
    std::fs::write(&bundle_path, doctored).unwrap();
    let (code, stdout, _) = run(&[
        "--format",
        "machine",
        "replay",
        path(&bundle_path),
        "--samples",
        path(&samples),
    ]);
    assert_eq!(code, 1);
    assert_eq!(stdout.trim(), r#"{"replayed":false}"#);
}

#[test]
fn replay_wants_at_most_one_input() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("b.json");
    let spec = demo("idioms.spec.json");
    let samples = demo("nd-samples.json");
    let (code, _, _) = run(&["--out", path(&bundle), "encode", path(&spec)]);
    assert_eq!(code, 0);
    let (code, _, stderr) = run(&[
        "replay",
        path(&bundle),
        "--spec",
        path(&spec),
        "--samples",
        path(&samples),
    ]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn fit_recovers_the_left_spine_recurrence() {
    let samples = demo("nd-samples.json");
    let (code, stdout, _) = run(&["fit", path(&samples)]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("fitted: 10*x + y"), "stdout: {stdout}");
}

#[test]
fn fit_refutes_the_right_spine_samples() {
    let samples = demo("dn-samples.json");
    let (code, stdout, _) = run(&["fit", path(&samples)]);
    assert_eq!(code, 1, "stdout: {stdout}");
    assert!(stdout.contains("refuted at degree 3"), "stdout: {stdout}");
}

#[test]
fn fit_reports_the_coordination_witness_pair() {
    let samples = demo("coord-samples.json");
    let (code, stdout, _) = run(&["--format", "machine", "fit", path(&samples)]);
    assert_eq!(code, 1);
    let bundle = deserialize_bundle(stdout.trim().as_bytes()).unwrap();
    let cert = bundle
        .items
        .iter()
        .find_map(|i| match i {
            BundleItem::Outcome(FitOutcome::Decided(c)) => Some(c),
            _ => None,
        })
        .expect("a decision");
    let Certificate::RefutedByInconsistency { first, second } = cert else {
        panic!("expected an inconsistency witness, got {cert}");
    };
    // Same projected arguments (1, 0); the full assignments disagree on
    // the whole's value, so no function of the projections exists.
    assert_eq!(
        first.args,
        vec![MeaningValue::Bool(true), MeaningValue::Bool(false)]
    );
    assert_eq!(first.args, second.args);
    assert_eq!(first.target, MeaningValue::Bool(true));
    assert_eq!(second.target, MeaningValue::Bool(false));
    assert_eq!(first.label.as_deref(), Some("a=1,b=0,c=1"));
    assert_eq!(second.label.as_deref(), Some("a=1,b=1,c=0"));
}

#[test]
fn fit_budget_is_polynomial_only() {
    let samples = demo("coord-samples.json");
    let (code, _, stderr) = run(&["fit", path(&samples), "--budget", "3"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("poly2"), "stderr: {stderr}");
}

#[test]
fn fit_needs_a_class_from_somewhere() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bare.json");
    std::fs::write(
        &file,
        r#"{"samples":[{"args":[1,2],"target":12},{"args":[3,4],"target":34}]}"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&["fit", path(&file)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("class"), "stderr: {stderr}");
    let (code, stdout, _) = run(&["fit", path(&file), "--class", "poly2", "--degree", "1"]);
    assert_eq!(code, 0, "{stdout}");
}

#[test]
fn fit_with_budget_three_still_extends_to_all_samples() {
    let samples = demo("nd-samples.json");
    let (code, stdout, _) = run(&["--format", "machine", "fit", path(&samples), "--budget", "3"]);
    assert_eq!(code, 0);
    let bundle = deserialize_bundle(stdout.trim().as_bytes()).unwrap();
    let fitted = bundle.items.iter().find_map(|i| match i {
        BundleItem::Outcome(FitOutcome::Decided(Certificate::Fitted { function })) => {
            Some(function)
        }
        _ => None,
    });
    let Some(FittedFunction::Polynomial { degree, .. }) = fitted else {
        panic!("expected a fitted polynomial");
    };
    assert_eq!(*degree, 1);
}

#[test]
fn refute_dn_refutes_every_degree_and_replays() {
    let (code, stdout, _) = run(&["refute-dn", "--max-degree", "3"]);
    assert_eq!(code, 0, "stdout: {stdout}");
    for d in 1..=3 {
        assert!(
            stdout.contains(&format!("degree {d}: refuted")),
            "stdout: {stdout}"
        );
    }
    assert!(stdout.contains("[replays]"), "stdout: {stdout}");
    assert!(stdout.contains("all degrees refuted"), "stdout: {stdout}");
}

#[test]
fn refute_dn_control_grammar_fits_instead() {
    let (code, stdout, _) = run(&["refute-dn", "--grammar", "nd", "--max-degree", "2"]);
    assert_eq!(code, 1, "stdout: {stdout}");
    assert!(stdout.contains("fitted: 10*x + y"), "stdout: {stdout}");
    assert!(
        stdout.contains("not refuted at every degree"),
        "stdout: {stdout}"
    );
}

#[test]
fn refute_dn_degree_bounds() {
    let (code, _, stderr) = run(&["refute-dn", "--max-degree", "0"]);
    assert_eq!(code, 2, "stderr: {stderr}");
    let (code, _, stderr) = run(&["refute-dn", "--max-degree", "20"]);
    assert_eq!(code, 3, "stderr: {stderr}");
}

#[test]
fn refute_dn_bundle_replays_without_extra_input() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("refute.bundle.json");
    let (code, _, _) = run(&["--out", path(&bundle), "refute-dn", "--max-degree", "2"]);
    assert_eq!(code, 0);
    let (code, stdout, _) = run(&["replay", path(&bundle)]);
    assert_eq!(code, 0, "stdout: {stdout}");
    // Changing the recorded job must be caught by the input digest, not
    // silently replayed as a different job.
    let doctored = std::fs::read_to_string(&bundle)
        .unwrap()
        .replace("\"max_degree\":2", "\"max_degree\":1");
    std::fs::write(&bundle, doctored).unwrap();
    let (code, _, stderr) = run(&["replay", path(&bundle)]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("digest"), "stderr: {stderr}");
}

#[test]
fn enumerate_walks_the_infinite_numeral_stream() {
    let (code, stdout, _) = run(&["enumerate", "--stream", "nd", "--row", "5", "--pair", "0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "mu(5): <5, 5>");
    // Ten digits can follow a numeral; an eleventh pair does not exist,
    // and the stream proves it without scanning forever.
    let (code, stdout, _) = run(&["enumerate", "--stream", "nd", "--row", "5", "--pair", "10"]);
    assert_eq!(code, 0, "{stdout}");
    let (code, stdout, _) = run(&["enumerate", "--stream", "nd", "--row", "5", "--pair", "11"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("out of range"), "stdout: {stdout}");
}

#[test]
fn enumerate_reads_a_spec_table_entry() {
    let spec = demo("coordination.spec.json");
    let (code, stdout, _) = run(&[
        "--format",
        "machine",
        "enumerate",
        path(&spec),
        "--row",
        "0",
        "--pair",
        "0",
    ]);
    assert_eq!(code, 0);
    let entry: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(entry["base"]["key"], serde_json::json!("marker"));
    let (code, _, stderr) = run(&["enumerate", path(&spec), "--row", "99", "--pair", "0"]);
    assert_eq!(code, 1, "stderr: {stderr}");
}

#[test]
fn enumerate_takes_exactly_one_source() {
    let spec = demo("idioms.spec.json");
    let (code, _, stderr) = run(&[
        "enumerate",
        path(&spec),
        "--stream",
        "nd",
        "--row",
        "0",
        "--pair",
        "0",
    ]);
    assert_eq!(code, 2, "stderr: {stderr}");
    let (code, _, stderr) = run(&["enumerate", "--row", "0", "--pair", "0"]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn missing_files_are_io_failures() {
    let (code, _, stderr) = run(&["encode", "/nonexistent/language.json"]);
    assert_eq!(code, 3, "stderr: {stderr}");
    let (code, _, _) = run(&["fit", "/nonexistent/samples.json"]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["replay", "/nonexistent/bundle.json"]);
    assert_eq!(code, 3);
}

#[test]
fn malformed_files_are_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    let (code, _, stderr) = run(&["encode", path(&junk)]);
    assert_eq!(code, 2, "stderr: {stderr}");
    let (code, _, _) = run(&["fit", path(&junk)]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["replay", path(&junk)]);
    assert_eq!(code, 2);
}

#[test]
fn variant_override_changes_the_encoding() {
    let spec = demo("idioms.spec.json");
    let (code, stdout, _) = run(&["encode", path(&spec), "--variant", "dollar", "--table"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("<$,"), "stdout: {stdout}");
    assert!(stdout.contains("PASS"), "stdout: {stdout}");
}
