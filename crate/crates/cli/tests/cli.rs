use std::process::{Command, Output};

fn oriented(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oriented"))
        .args(args)
        .env_remove("ORIENTED_BUDGET")
        .output()
        .expect("spawn oriented")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_counts_passes() {
    let out = oriented(&["verify", "--suite", "counts", "--kind", "op", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let records = stdout_json(&out);
    assert!(records.as_array().unwrap().iter().all(|r| r["outcome"] == "pass"));
}

#[test]
fn dihedral_count() {
    let out = oriented(&["count", "--kind", "d2", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["formula_total"], "36");
}

#[test]
fn count_both_fills_enumeration() {
    let out = oriented(&["count", "--kind", "pori", "--n", "3", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["formula_total"], "54");
    assert_eq!(r["enumerated_total"], "54");
}

#[test]
fn build_writes_elements() {
    let dir = std::env::temp_dir().join(format!("oriented-build-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("or3.json");
    let out = oriented(&["build", "--kind", "or", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(s["size"], 27);
    assert_eq!(s["elements"].as_array().unwrap().len(), 27);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn endos_lists_every_map() {
    let out = oriented(&["endos", "--kind", "popi", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 41);
}

#[test]
fn table_csv() {
    let out = oriented(&["table", "--kinds", "op,por", "--n-max", "6", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,n,T1,T2,T34_7,T4,T5,T6,total,enumerated"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(oriented(&["bogus"]).status.code(), Some(2));
    assert_eq!(oriented(&["count", "--kind", "xyz", "--n", "3"]).status.code(), Some(2));
    assert_eq!(oriented(&["count", "--kind", "op", "--n", "1"]).status.code(), Some(2));
    assert_eq!(oriented(&["verify", "--suite", "normalizer", "--kind", "op", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "green", "--kind", "popi", "--n", "3"];
    assert_eq!(oriented(&args).stdout, oriented(&args).stdout);
}
