//! Every JSON report is checked against its schema under docs/schemas. The
//! schemas declare exact rationals with the custom format "rational" (`p/q`).

use goodbrackets::cli::run_command;
use serde_json::Value;
use std::path::PathBuf;

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schemas")
        .join(format!("{name}.v1.json"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn is_rational(s: &str) -> bool {
    let Some((p, q)) = s.split_once('/') else { return false };
    let p = p.strip_prefix('-').unwrap_or(p);
    !p.is_empty() && !q.is_empty() && p.bytes().all(|b| b.is_ascii_digit()) && q.bytes().all(|b| b.is_ascii_digit())
}

fn validator(name: &str) -> jsonschema::Validator {
    jsonschema::options()
        .with_format("rational", is_rational)
        .should_validate_formats(true)
        .build(&schema(name))
        .unwrap()
}

fn check(name: &str, args: &[&str]) -> Value {
    let out = run_command(std::iter::once("goodbrackets").chain(args.iter().copied()));
    assert!(out.code <= 1, "{args:?}: {}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let errs: Vec<String> = validator(name).iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errs.is_empty(), "{name} {args:?}: {errs:?}");
    v
}

/// No float may appear in a report except the fitted slopes.
fn no_floats(v: &Value, path: &str) {
    match v {
        Value::Number(n) => assert!(n.is_i64() || n.is_u64() || path.ends_with("slope_single") || path.ends_with("slope_global"), "float at {path}"),
        Value::Array(a) => a.iter().for_each(|x| no_floats(x, path)),
        Value::Object(o) => o.iter().for_each(|(k, x)| no_floats(x, &format!("{path}.{k}"))),
        _ => {}
    }
}

#[test]
fn validator_rejects_bad_documents() {
    let v = validator("extend");
    let bad = serde_json::json!({"schema": "goodbrackets/extend/v1", "kind": "step4", "fields": []});
    assert!(!v.is_valid(&bad));
    let q = validator("flow");
    let mut doc = serde_json::json!({
        "schema": "goodbrackets/flow/v1", "letters": 1, "degree": 2, "control": "1:1",
        "total_time": "1/1", "endpoint": "1", "logchart": "0"
    });
    assert!(q.is_valid(&doc));
    doc["total_time"] = serde_json::json!("1.0");
    assert!(!q.is_valid(&doc));
}

#[test]
fn all_reports_validate() {
    let reports = [
        check("hall", &["hall", "--letters", "2", "--degree", "4"]),
        check("dynkin", &["dynkin", "--letters", "2", "--degree", "3", "a1 a2 a0"]),
        check("certify", &["certify", "--letters", "1", "--degree", "3", "a0 - [a1,[a1,a0]]"]),
        check("certify", &["certify", "--letters", "1", "--degree", "3", "a0 + 1/2*[a1,a0] + 1/6*[a1,[a1,a0]]"]),
        check("certify", &["certify", "--letters", "2", "--degree", "4", "a0 + [a1,[a2,a0]] + [a1,a2]"]),
        check("certify", &["certify", "--letters", "2", "--degree", "3", "[a1,a2]"]),
        check("certify", &["certify", "--letters", "1", "--degree", "3", "2*a0"]),
        check("simulate", &["simulate", "--degree", "4", "--control", "1:1", "--eps", "1/2,1/4"]),
        check("flow", &["simulate", "--letters", "2", "--degree", "3", "--control", "1:1,0;1/2:0,-1"]),
        check("kalman", &["kalman", "--system", r#"{"m":2,"components":[[{"exponents":[0,1],"coefficient":"1"}],[{"exponents":[3,0],"coefficient":"1"}]]}"#, "--subspace", "1,0"]),
        check("extend", &["extend", "step3", "--k", "3"]),
        check("extend", &["extend", "scalar", "--m", "4"]),
        check("quotient", &["quotient", "--letters", "1", "--degree", "3", "--m", "1", "a1", "--z", "a1"]),
    ];
    for r in &reports {
        no_floats(r, "$");
    }
}
