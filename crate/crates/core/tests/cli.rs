use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn jobs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../jobs")
}

fn run(args: &[&str]) -> (Value, String, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_primform")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).expect("stdout is one JSON document"), text, out.status.success())
}

fn job(name: &str) -> String {
    jobs().join(name).display().to_string()
}

#[test]
fn analyze_e12() {
    let (doc, _, ok) = run(&["--job", &job("e12.json"), "--command", "analyze"]);
    assert!(ok);
    assert_eq!(doc["schema"], json!("saito-forms/1"));
    assert_eq!(doc["result"]["mu"], json!(12));
    assert_eq!(doc["result"]["s"], json!("22/21"));
    assert_eq!(doc["result"]["D"], json!(0));
}

#[test]
fn a3_primitive_form_is_one() {
    let (doc, _, ok) = run(&["--job", &job("a3.json")]);
    assert!(ok);
    assert_eq!(
        doc["result"]["records"],
        json!([{ "t_power": 0, "basis_index": 1, "u_monomial": [0, 0, 0], "coefficient": "1" }])
    );
}

#[test]
fn e6_moduli_and_flags() {
    let (doc, _, ok) = run(&["--job", &job("e6_elliptic.json")]);
    assert!(ok);
    assert_eq!(doc["result"]["d"], json!(1));
    assert_eq!(doc["result"]["free"], json!([[8, 1]]));
    // c[8,1] = 1 with the single sigma direction
    let (doc, _, ok) =
        run(&["--job", &job("e6_elliptic.json"), "--command", "primitive-form", "--order", "6", "--set-c", "8,1=1"]);
    assert!(ok, "{doc}");
    assert_eq!(doc["result"]["c"], json!({ "8,1": "1" }));
    let (unpruned, _, _) = run(&[
        "--job",
        &job("e6_elliptic.json"),
        "--command",
        "primitive-form",
        "--order",
        "6",
        "--set-c",
        "8,1=1",
        "--no-prune",
    ]);
    assert_eq!(doc["result"]["records"], unpruned["result"]["records"]);
}

#[test]
fn p1_pairings_and_verify() {
    let (doc, _, ok) = run(&["--job", &job("p1.json")]);
    assert!(ok);
    let vals = &doc["result"]["values"];
    assert_eq!(vals[0]["value"], json!({}));
    assert_eq!(vals[1]["value"], json!({ "0": "-1" }));
    assert_eq!(vals[2]["value"], json!({}));
    let (doc, _, ok) = run(&["--job", &job("p1.json"), "--command", "verify"]);
    assert!(ok);
    assert_eq!(doc["result"]["pass"], json!(true));
}

#[test]
fn byte_stable_output() {
    let (_, a, _) = run(&["--job", &job("e12.json"), "--order", "3"]);
    let (_, b, _) = run(&["--job", &job("e12.json"), "--order", "3"]);
    assert_eq!(a, b);
}

#[test]
fn structured_error_and_exit_code() {
    let (doc, _, ok) = run(&["--job", &job("e12.json"), "--set-c", "2,1=1"]);
    assert!(!ok);
    assert_eq!(doc["error"]["code"], json!("ForbiddenOppositeParameter"));
    assert_eq!(doc["error"]["module"], json!("unfolding"));
    let (doc, _, ok) = run(&["--job", "/nonexistent/job.json"]);
    assert!(!ok);
    assert_eq!(doc["error"]["code"], json!("InvalidJob"));
}
