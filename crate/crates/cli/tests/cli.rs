//! End-to-end tests of the binary: spec payloads in, JSON + exit codes out.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Stdio};

fn run(args: &[&str], stdin: &str) -> (Value, i32, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_zn-ci"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let raw = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&raw).expect("output is JSON");
    (value, out.status.code().unwrap_or(-1), raw)
}

#[test]
fn decide_ci_hexagonal_fixture() {
    let payload = r#"{"n":2,"mode":"undirected","set":[[2,0],[0,1],[2,1]]}"#;
    let (doc, code, _) = run(&["decide-ci"], payload);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["is_ci"], Value::Bool(true));
    assert_eq!(doc["result"]["reason"], "PRODUCT_CONDITION_HOLDS");
    assert_eq!(doc["result"]["certificate"]["k"], 2);
    assert_eq!(doc["result"]["certificate"]["card_quotient"], 6);
    // normalization echoed back: closure under negation gives 6 vectors
    assert_eq!(doc["input"]["set"].as_array().unwrap().len(), 6);
}

#[test]
fn decide_ci_not_squarefree() {
    let payload = r#"{"n":2,"mode":"undirected","set":[[4,0],[0,1]]}"#;
    let (doc, code, _) = run(&["decide-ci"], payload);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["is_ci"], Value::Bool(false));
    assert_eq!(doc["result"]["reason"], "COMPONENTS_NOT_SQUAREFREE");
    assert_eq!(doc["result"]["certificate"]["type"], "witness");
    assert!(doc["result"]["certificate"]["witness_set"].is_array());
}

#[test]
fn demo_mod5_verifies() {
    let (doc, code, _) = run(&["demo-mod5"], r#"{"N":100}"#);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["verified"], Value::Bool(true));
}

#[test]
fn z_iso_sign_and_exit_codes() {
    let (doc, code, _) = run(&["z-iso"], r#"{"set":[1,3],"set2":[-1,-3]}"#);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["sign"], -1);

    let (doc, code, _) = run(&["z-iso"], r#"{"set":[1,3],"set2":[1,2]}"#);
    assert_eq!(code, 1, "decided-negative exits 1");
    assert_eq!(doc["result"]["sign"], Value::Null);
}

#[test]
fn iso_witness_kinds() {
    let same = r#"{"n":2,"mode":"undirected","set":[[1,0],[0,1]],"set2":[[1,0],[0,1]]}"#;
    let (doc, code, _) = run(&["iso"], same);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["witness"]["kind"], "AMBIENT_AUTOMORPHISM");

    let comp = r#"{"n":2,"mode":"undirected","set":[[1,0]],"set2":[[2,0]]}"#;
    let (doc, code, _) = run(&["iso"], comp);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["witness"]["kind"], "COMPONENTWISE");
    assert_eq!(doc["result"]["witness"]["components"], "INFINITE");

    let none = r#"{"n":1,"mode":"undirected","set":[[1]],"set2":[[2]]}"#;
    let (doc, code, _) = run(&["iso"], none);
    assert_eq!(code, 1);
    assert_eq!(doc["result"]["witness"]["kind"], "NONE");
}

#[test]
fn stab_reports_the_hexagonal_group() {
    let payload = r#"{"n":2,"mode":"undirected","set":[[1,0],[0,1],[1,1]]}"#;
    let (doc, code, _) = run(&["stab"], payload);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["order"], 12);
    assert_eq!(doc["result"]["elements"].as_array().unwrap().len(), 12);
}

#[test]
fn snf_reports_invariant_factors() {
    let (doc, code, _) = run(&["snf"], r#"{"matrix":[[2,4],[6,8]]}"#);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["invariant_factors"], serde_json::json!([2, 4]));
    assert_eq!(doc["result"]["rank"], 2);
}

#[test]
fn scan_finite_z5_is_empty() {
    let (doc, code, _) = run(
        &["scan-finite"],
        r#"{"group":{"cyclic":5},"mode":"undirected"}"#,
    );
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["count"], 0);
}

#[test]
fn verify_round_trips() {
    for (cmd, payload) in [
        ("decide-ci", r#"{"n":2,"mode":"undirected","set":[[2,0],[0,1],[2,1]]}"#),
        ("decide-ci", r#"{"n":2,"mode":"undirected","set":[[2,0],[0,1]]}"#),
        ("iso", r#"{"n":2,"mode":"undirected","set":[[1,0],[0,1]],"set2":[[0,1],[1,0]]}"#),
        ("z-iso", r#"{"set":[1,3],"set2":[-1,-3]}"#),
        ("snf", r#"{"matrix":[[2,0,2],[0,1,1]]}"#),
        ("demo-mod5", r#"{"N":25}"#),
        ("stab", r#"{"n":2,"mode":"undirected","set":[[1,0],[0,1]]}"#),
        ("scan-finite", r#"{"group":{"primary":[2,2]},"mode":"undirected"}"#),
    ] {
        let (doc, _, raw) = run(&[cmd], payload);
        let _ = doc;
        let (vdoc, vcode, _) = run(&["verify"], &raw);
        assert_eq!(vcode, 0, "{cmd} output must verify");
        assert_eq!(vdoc["result"]["valid"], Value::Bool(true), "{cmd}");
    }
}

#[test]
fn verify_rejects_tampered_results() {
    let payload = r#"{"n":2,"mode":"undirected","set":[[2,0],[0,1],[2,1]]}"#;
    let (_, _, raw) = run(&["decide-ci"], payload);
    let tampered = raw.replace("\"is_ci\": true", "\"is_ci\": false");
    let (doc, code, _) = run(&["verify"], &tampered);
    assert_eq!(code, 1);
    assert_eq!(doc["result"]["valid"], Value::Bool(false));
}

#[test]
fn malformed_input_exits_2() {
    let (doc, code, _) = run(&["decide-ci"], "{not json");
    assert_eq!(code, 2);
    assert!(doc["error"]["message"].is_string());

    let (doc, code, _) = run(&["decide-ci"], r#"{"n":2,"mode":"undirected","set":[[0,0]]}"#);
    assert_eq!(code, 2, "zero vector rejected");
    assert!(doc["error"]["message"].is_string());

    let (_, code, _) = run(&["decide-ci"], r#"{"n":2,"mode":"undirected","set":[]}"#);
    assert_eq!(code, 2, "empty set rejected");
}

#[test]
fn output_is_byte_deterministic() {
    let payload = r#"{"n":2,"mode":"undirected","set":[[2,1],[0,1],[2,0]]}"#;
    let (_, _, first) = run(&["decide-ci"], payload);
    let (_, _, second) = run(&["decide-ci"], payload);
    assert_eq!(first, second);
}

#[test]
fn seed_is_echoed() {
    let (doc, _, _) = run(&["--seed", "7", "demo-mod5"], r#"{"N":10}"#);
    assert_eq!(doc["seed"], 7);
}

#[test]
fn big_integers_ride_as_strings() {
    // entries beyond 53-bit safety must come back as decimal strings
    let payload = r#"{"matrix":[["36028797018963969",0],[0,1]]}"#;
    let (doc, code, _) = run(&["snf"], payload);
    assert_eq!(code, 0);
    assert_eq!(
        doc["result"]["invariant_factors"],
        serde_json::json!([1, "36028797018963969"])
    );
}
