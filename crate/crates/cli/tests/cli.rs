use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn example(name: &str) -> String {
    root().join("examples").join(name).display().to_string()
}

fn fixture(name: &str) -> String {
    root().join("crates/core/tests/fixtures").join(name).display().to_string()
}

fn chcmodel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chcmodel")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn square_model() {
    let o = chcmodel(&["model", &example("ex3.chc")]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "model P/2 := (and (>= x1 0) (<= x1 2) (>= x2 0) (<= x2 2))\nmodel Q/2 := (and (>= x1 1) (>= x2 1))\n"
    );
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["saturate", "--format", "json"],
        vec!["model"],
        vec!["explain"],
    ] {
        let mut a = args.clone();
        let path = example("ex4-unsaturated.chc");
        a.push(&path);
        assert_eq!(chcmodel(&a).stdout, chcmodel(&a).stdout, "{args:?}");
    }
}

#[test]
fn explain_repair_example() {
    let o = chcmodel(&["explain", &example("ex4-unsaturated.chc")]);
    assert_eq!(code(&o), 3);
    assert_eq!(
        stdout(&o),
        "violated: C4: x ≤ 0 ∥ ¬Q(x) ∨ P(x)\nwitness: x = 0\natom: Q(0)\nproducer: C3: x < 1 ∥ Q(x)\nresolvent: x ≤ 0 ∥ P(x)\n"
    );
    let o = chcmodel(&["explain", &example("ex3.chc")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn explain_json() {
    let o = chcmodel(&["explain", "--format", "json", &example("ex4-unsaturated.chc")]);
    assert_eq!(code(&o), 3);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["violated_clause"], "C4");
    assert_eq!(v["producer_clause"], "C3");
    assert_eq!(v["max_neg_literal"], "Q(0)");
    assert_eq!(v["resolvent"]["text"], "(clause C5 (<= x 0) (P x))");
}

#[test]
fn saturation_trace() {
    let o = chcmodel(&["saturate", &example("ex4-unsaturated.chc")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("derived C5: x ≤ 0 ∥ P(x) from C4 x C3\n"), "{text}");
    assert!(text.contains("subsumed C4 by C5\n"), "{text}");
    assert!(text.contains("status saturated\n"), "{text}");
}

#[test]
fn refutation() {
    let o = chcmodel(&["saturate", &example("contradiction.chc")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("status refuted"));
    assert_eq!(code(&chcmodel(&["model", &example("contradiction.chc")])), 1);
}

#[test]
fn resource_limit() {
    let path = fixture("paths.chc");
    let o = chcmodel(&["model", "--order", "E,T", "--max-derived", "5", &path]);
    assert_eq!(code(&o), 2);
    let o = chcmodel(&["model", "--order", "E,T", "--max-derived", "5", "--force", &path]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("; UNSATURATED"));
}

#[test]
fn eval_queries() {
    let path = example("ex3.chc");
    let o = chcmodel(&["eval", &path, "(clause (and (>= x 1) (>= y 1)) (Q x y))"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).ends_with("valid\n"));
    let o = chcmodel(&["eval", &path, "(clause (>= x 0) (P x x))"]);
    assert_eq!(code(&o), 5);
    assert!(stdout(&o).contains("violated\nwitness: x = "));
}

#[test]
fn check_least() {
    let o = chcmodel(&["check-least", &example("ex3-lia.chc")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "window [0, 4] (closed)\nagree\n");
    let o = chcmodel(&["check-least", "--window", "-1", "3", "--format", "json", &fixture("chain.chc")]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["window"], serde_json::json!([-1, 3]));
    assert_eq!(v["agree"], true);
    // the oracle is integer-only
    assert_eq!(code(&chcmodel(&["check-least", "--window", "0", "2", &example("ex3.chc")])), 64);
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.chc");
    std::fs::write(&bad, "(theory lra)\n(pred P 1)\n(clause true (P x y))\n").unwrap();
    let o = chcmodel(&["model", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 10);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.chc:3:"));
    assert_eq!(code(&chcmodel(&["model", dir.path().join("missing.chc").to_str().unwrap()])), 11);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&chcmodel(&[])), 64);
    assert_eq!(code(&chcmodel(&["frobnicate"])), 64);
    let path = example("ex3.chc");
    assert_eq!(code(&chcmodel(&["model", "--order", "P", &path])), 64);
    assert_eq!(code(&chcmodel(&["model", "--window", "3", "1", &path])), 64);
    assert_eq!(code(&chcmodel(&["--help"])), 0);
}
