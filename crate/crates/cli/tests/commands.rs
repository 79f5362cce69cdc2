use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn padreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padreg")).args(args).env_remove("PADREG_TARGET").output().expect("spawn padreg")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn fixture(name: &str, v: &Value) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

#[test]
fn simplex_integrate_closed_form() {
    let out = padreg(&["simplex-integrate", "--a", "1,1,0,0", "--omit", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["value"], "1/120");

    let out = padreg(&["simplex-integrate", "--a", "1,0,0,0", "--omit", "1", "--oracle"]);
    let v = json_of(&out);
    assert_eq!(v["value"], "-1/24");
    assert_eq!(v["agree"], true);
}

#[test]
fn s1_cocycle_is_log() {
    let input = fixture("s1.json", &json!({"p": 5, "M": 12, "e": 1, "s": 1, "N": 1, "elems": [[["1"]], [["6"]]]}));
    let eval = padreg(&["cocycle-eval", "--input", input.to_str().unwrap(), "--target", "6"]);
    assert_eq!(eval.status.code(), Some(0), "{}", String::from_utf8_lossy(&eval.stderr));
    let log = padreg(&["log", "--p", "5", "--x", "6", "--target", "6"]);
    assert_eq!(json_of(&eval)["value"], json_of(&log)["value"]);
    assert_eq!(json_of(&eval)["value"]["valuation"], 1);
}

#[test]
fn check_verbs_pass() {
    let input = fixture(
        "s1_triple.json",
        &json!({"p": 3, "M": 14, "e": 1, "s": 1, "N": 2,
                "elems": [[["4", "3"], ["6", "1"]], [["1", "0"], ["3", "7"]], [["10", "9"], ["-3", "1"]]]}),
    );
    let out = padreg(&["cocycle-check", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["passed"], true);

    let inv = fixture(
        "conj.json",
        &json!({"tuple": {"p": 3, "M": 14, "e": 1, "s": 1, "N": 2, "elems": [[["4", "3"], ["6", "1"]], [["1", "0"], ["3", "7"]]]},
                "mode": "conjugate", "y1": [["1", "2"], ["0", "1"]]}),
    );
    let out = padreg(&["invariance-check", "--input", inv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes() {
    assert_eq!(padreg(&["simplex-integrate", "--a", "1,1", "--omit", "4"]).status.code(), Some(4));
    let bad = fixture("bad_schema.json", &json!({"p": 5, "M": 12, "e": 1, "s": 1, "N": 1, "elems": [], "extra": 1}));
    assert_eq!(padreg(&["cocycle-eval", "--input", bad.to_str().unwrap()]).status.code(), Some(4));
    let short = fixture("short.json", &json!({"p": 5, "M": 4, "e": 1, "s": 1, "N": 1, "elems": [[["1"]], [["6"]]]}));
    let out = padreg(&["cocycle-eval", "--input", short.to_str().unwrap(), "--target", "6"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "precondition");
    let noncongruent =
        fixture("noncongruent.json", &json!({"p": 5, "M": 12, "e": 1, "s": 1, "N": 1, "elems": [[["1"]], [["2"]]]}));
    assert_eq!(padreg(&["cocycle-eval", "--input", noncongruent.to_str().unwrap()]).status.code(), Some(3));
    assert_ne!(padreg(&["cocycle-eval", "--bogus"]).status.code(), Some(0));
}

#[test]
fn repeat_runs_are_identical() {
    let a = padreg(&["absval", "--x", "-12/35", "--p", "5", "--check-product"]);
    let b = padreg(&["absval", "--x", "-12/35", "--p", "5", "--check-product"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["product"]["exact"], "1");
}

#[test]
fn transfer_output_reparses() {
    let group = fixture(
        "s3.json",
        &json!({"kind": "permutation", "degree": 3, "generators": [[1, 2, 0], [1, 0, 2]], "subgroup": [[1, 2, 0]]}),
    );
    let chain = fixture("chain.json", &json!({"terms": [{"coeff": 2, "tuple": [[1, 0, 2], [2, 1, 0]]}]}));
    let out = padreg(&["transfer-apply", "--group", group.to_str().unwrap(), "--chain", chain.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let image = fixture("image.json", &json_of(&out));
    let again = padreg(&["transfer-apply", "--group", group.to_str().unwrap(), "--chain", image.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));

    let check = padreg(&["transfer-check", "--group", group.to_str().unwrap(), "--chain", chain.to_str().unwrap()]);
    assert_eq!(json_of(&check)["chain_map"], true);
}

#[test]
fn regulator_matches_log() {
    let config = fixture("reg.json", &json!({"p": 3, "M": 16, "e": 1, "s": 1, "N": 1, "target": 6}));
    let chain = fixture("unit.json", &json!({"terms": [{"coeff": 1, "tuple": [[["2"]]]}]}));
    let out = padreg(&["regulator", "rnf", "--config", config.to_str().unwrap(), "--chain", chain.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let flat = padreg(&["regulator-rnf", "--config", config.to_str().unwrap(), "--chain", chain.to_str().unwrap()]);
    assert_eq!(out.stdout, flat.stdout);
    let log = padreg(&["log", "--p", "3", "--x", "2", "--target", "6"]);
    assert_eq!(json_of(&out)["value"], json_of(&log)["value"]);
}

#[test]
fn selftest_passes() {
    let out = padreg(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}
