use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_goodbrackets"))
}

#[test]
fn certify_not_good_exits_one_with_witness() {
    let out = bin()
        .args(["certify", "--letters", "1", "--degree", "3", "a0 - [a1,[a1,a0]]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "NOT_GOOD");
    assert_eq!(v["psd"]["value"], "-2/1");
}

#[test]
fn hall_and_extend_examples() {
    let out = bin().args(["hall", "--letters", "2", "--degree", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["elements"].as_array().unwrap().len(), 5);

    let out = bin().args(["extend", "step3", "--k", "2"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["control_count"], 11);
}

#[test]
fn usage_and_computation_errors() {
    let out = bin().args(["certify", "--letters", "1", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = bin().args(["nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["certify", "--letters", "1", "--degree", "3", "[a1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected ','"));
    // a letter outside the alphabet is detected when evaluating
    let out = bin()
        .args(["certify", "--letters", "1", "--degree", "3", "[a2,a0]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_file_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = bin()
        .args(["simulate", "--degree", "4", "--control", "1:1", "--eps", "1/4,1/8", "--format", "csv", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "eps,err_deg1,err_deg2,err_deg3,err_deg4,slope_single,slope_global");
    assert_eq!(csv.lines().count(), 3);

    let out = bin()
        .args(["--format", "text", "certify", "--letters", "1", "--degree", "3", "a0 + [a1,[a1,a0]]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("status: GOOD"));
}
