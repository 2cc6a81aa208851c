use std::process::Command;

use jsjkit::{run, SCHEMA};
use jsjkit_core::catalog::ENTRIES;
use jsjkit_core::format::{parse_spec, print_spec};
use serde_json::Value;

fn jsjkit(args: &[&str]) -> (String, i32) {
    let out = run(std::iter::once("jsjkit").chain(args.iter().copied()));
    (out.output, out.code)
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (text, code) = jsjkit(&full);
    (serde_json::from_str(&text).expect("valid JSON"), code)
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_jsjkit");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["validate", "catalog:d3"]), 0);
    assert_eq!(status(&["verify", "catalog:sol", "--edge", "e1"]), 1);
    assert_eq!(status(&["euler", "catalog:d3", "Z"]), 2);
    assert_eq!(status(&["frobnicate"]), 2);
    assert_eq!(status(&["validate", "/no/such/file.gm"]), 2);
}

#[test]
fn classify_text_rows() {
    let (text, code) = jsjkit(&["classify", "catalog:d3"]);
    assert_eq!(code, 0);
    assert!(text.lines().any(|l| l == "edge e1: amalgam, step 1, acyl 2"), "{text}");
    let (text, _) = jsjkit(&["classify", "catalog:nd2"]);
    assert!(text.lines().any(|l| l == "edge e1: HNN, step 2, acyl 2"), "{text}");
}

#[test]
fn euler_text() {
    let (text, code) = jsjkit(&["euler", "catalog:d3", "A"]);
    assert_eq!((text.as_str(), code), ("5/6 (mod 1)\n", 0));
}

#[test]
fn canonicalize_idempotent() {
    let (text, code) = jsjkit(&["canonicalize", "catalog:d4", "A"]);
    assert_eq!(code, 0);
    let sym: jsjkit_core::symbol::SeifertSymbol = text.trim().parse().unwrap();
    assert_eq!(sym.canonicalize().to_string(), text.trim());
}

#[test]
fn invalid_spec_exit_one() {
    let dir = std::env::temp_dir().join(format!("jsjkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.gm");
    std::fs::write(&path, "piece A klein\npiece B klein\nglue A.1 B.1 matrix=[[2,0],[0,1]]\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(jsjkit(&["validate", p]).1, 1);
    let (doc, code) = json(&["classify", p]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "rejected");
    assert_eq!(doc["report"]["valid"], false);
    assert!(validator().is_valid(&doc));
    std::fs::write(&path, "piece A klein\nglue A.1\n").unwrap();
    assert_eq!(jsjkit(&["validate", p]).1, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sol_like_rejected() {
    let (text, code) = jsjkit(&["verify", "catalog:sol", "--edge", "e1"]);
    assert_eq!(code, 1);
    assert!(text.starts_with("excluded: Sol-like"), "{text}");
    let (doc, code) = json(&["verify", "catalog:sol", "--edge", "e1"]);
    assert_eq!(code, 1);
    assert!(doc["error"]["message"].as_str().unwrap().starts_with("excluded: Sol-like"));
}

#[test]
fn text_and_json_agree() {
    let (text, _) = jsjkit(&["verify", "catalog:d4", "--edge", "e1"]);
    let (doc, code) = json(&["verify", "catalog:d4", "--edge", "e1"]);
    assert_eq!(code, 0);
    let r = &doc["report"];
    let head = format!("edge e1: amalgam, step {}, acyl {}", r["step"], r["acylindricity"]);
    assert!(text.starts_with(&head), "{text}");
    let v = &r["verification"];
    let counts = format!(
        "{} conjugators, {} pairs, {} counterexamples",
        v["conjugators"],
        v["pairs"],
        v["counterexamples"].as_array().unwrap().len()
    );
    assert!(text.contains(&counts), "{text}");
    assert!(text.contains(&format!("syllable length {}", r["witness"]["syllable_length"])));

    let (text, _) = jsjkit(&["tree", "catalog:leaves", "--radius", "2"]);
    let (doc, _) = json(&["tree", "catalog:leaves", "--radius", "2"]);
    let n = doc["report"]["nodes"].as_array().unwrap().len();
    assert!(text.starts_with(&format!("{n} tree vertices within radius 2, {} leaves", doc["report"]["leaves"])));
}

#[test]
fn word_problem_command() {
    let (text, code) = jsjkit(&["wp", "catalog:nd2", "A.c1 e1", "e1^-1 A.c1^-1"]);
    assert_eq!(code, 0);
    assert!(text.contains("identity"));
    let (doc, _) = json(&["wp", "catalog:d3", "A.f", "A.c1^2"]);
    assert_eq!(doc["report"]["identity"], true);
    assert_eq!(jsjkit(&["wp", "catalog:d3", "A.zz"]).1, 2);
    assert_eq!(jsjkit(&["wp", "catalog:d3", "A.c1 e1", "A.c1"]).1, 2);
}

#[test]
fn leaves_errors_are_usage() {
    assert_eq!(jsjkit(&["leaves", "catalog:leaves", "--v1", "0", "--v2", "7", "--radius", "2"]).1, 2);
    assert_eq!(jsjkit(&["leaves", "catalog:leaves", "--v1", "7", "--v2", "7", "--radius", "2"]).1, 2);
    assert_eq!(jsjkit(&["leaves", "catalog:leaves", "--v1", "7", "--v2", "8", "--radius", "2"]).1, 0);
}

#[test]
fn seeded_check_is_reproducible() {
    let a = jsjkit(&["--seed", "7", "check", "--cases", "30"]);
    let b = jsjkit(&["--seed", "7", "check", "--cases", "30"]);
    assert_eq!(a, b);
    assert_eq!(a.1, 0, "{}", a.0);
}

#[test]
fn catalog_round_trip_and_schema() {
    let v = validator();
    for e in ENTRIES {
        let spec = parse_spec(e.text).unwrap();
        assert_eq!(parse_spec(&print_spec(&spec)).unwrap(), spec, "{}", e.name);
        let file = format!("catalog:{}", e.name);
        for args in [vec!["validate", &file], vec!["classify", &file], vec!["present", &file]] {
            let (doc, _) = json(&args);
            assert!(v.is_valid(&doc), "{args:?}: {doc}");
        }
    }
    let (doc, code) = json(&["bogus"]);
    assert_eq!(code, 2);
    assert!(v.is_valid(&doc));
}
