//! Document round trips and the `bireflect` binary end to end.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use bireflect::algebra::{ratio, Sign};
use bireflect::cli::{ElementDocument, ReportDocument, Status, EXIT_NOT_BIREFLECTIONAL, EXIT_OK, EXIT_VALIDATION};
use bireflect::oracle::{gen_canonical_element, BlockSpec, GenSpec};
use bireflect::transform::GroupTag;

fn doc(gram: &[&[&str]], matrix: &[&[&str]]) -> String {
    let rows = |m: &[&[&str]]| m.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    ElementDocument { gram: rows(gram), matrix: rows(matrix), label: Some("t".into()) }.to_json()
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bireflect"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> ReportDocument {
    serde_json::from_slice(&out.stdout).expect("report json")
}

/// diag(2, 1/2) on a hyperbolic plane: in Ω, but every reversing
/// involution has determinant -1.
fn hyperbolic_boost() -> String {
    doc(&[&["0", "1"], &["1", "0"]], &[&["2", "0"], &["0", "1/2"]])
}

#[test]
fn element_document_round_trip() {
    let phi = gen_canonical_element(&GenSpec {
        blocks: vec![BlockSpec::Split { lambda: ratio(3, 2), t: 1 }, BlockSpec::Odd { eigen: Sign::Minus, dim: 1, high: false }],
        seed: 9,
    })
    .unwrap();
    let d = ElementDocument::from_map(&phi, Some("x".into()));
    let back = ElementDocument::parse(&d.to_json()).unwrap();
    assert_eq!(back, d);
    let loaded = back.load().unwrap();
    assert_eq!(loaded.matrix(), phi.matrix());
    assert_eq!(loaded.space().gram(), phi.space().gram());
}

#[test]
fn normalization_canonicalizes_rationals() {
    let raw = ElementDocument::parse(&doc(&[&["2/2", "0"], &["0", "-4/2"]], &[&["-1", "0"], &["0", "1"]])).unwrap();
    let n = raw.normalized().unwrap();
    assert_eq!(n.gram, vec![vec!["1".to_string(), "0".into()], vec!["0".into(), "-2".into()]]);
    assert_eq!(n.normalized().unwrap(), n);
}

#[test]
fn classify_reports_verdicts() {
    let out = run(&["classify"], &hyperbolic_boost());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = report(&out);
    assert_eq!(r.membership, GroupTag::Omega);
    assert_eq!(r.signature, (1, 1));
    let omega = r.verdict(GroupTag::Omega).unwrap();
    assert!(omega.member && !omega.reversible && !omega.bireflectional);
    assert!(r.verdict(GroupTag::O).unwrap().bireflectional);
}

#[test]
fn witness_exit_codes() {
    let out = run(&["witness"], &hyperbolic_boost());
    assert_eq!(out.status.code(), Some(EXIT_NOT_BIREFLECTIONAL));
    assert_eq!(report(&out).status, Status::NotBireflectional);

    let out = run(&["witness", "--group", "O"], &hyperbolic_boost());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r = report(&out);
    assert_eq!(r.status, Status::Verified);
    assert!(r.witness.is_some());
}

#[test]
fn zero_budget_is_inconclusive() {
    let out = run(&["witness", "--group", "O", "--budget", "0"], &hyperbolic_boost());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(report(&out).status, Status::Inconclusive);
}

#[test]
fn invalid_documents_exit_with_validation_code() {
    let cases = [
        "not json".to_string(),
        doc(&[&["1", "2"], &["3", "1"]], &[&["1", "0"], &["0", "1"]]),
        doc(&[&["1", "1"], &["1", "1"]], &[&["1", "0"], &["0", "1"]]),
        doc(&[&["1", "0"], &["0", "1"]], &[&["1", "1"], &["0", "1"]]),
        doc(&[&["1", "0"], &["0", "1"]], &[&["1", "0"]]),
        doc(&[&["1", "0"], &["0", "x"]], &[&["1", "0"], &["0", "1"]]),
    ];
    for c in &cases {
        let out = run(&["classify"], c);
        assert_eq!(out.status.code(), Some(EXIT_VALIDATION), "{c}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn text_format() {
    let out = run(&["classify", "--format", "text"], &hyperbolic_boost());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("label: t"));
    assert!(text.contains("membership: Omega"));
    assert!(text.contains("reverser profile"));
}

#[test]
fn small_corpus_runs_clean() {
    let out = run(&["corpus", "--max-dim", "3", "--per-signature", "2", "--budget", "16"], "");
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["conflicts"], 0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
}
