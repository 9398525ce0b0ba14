use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn summit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_summit"))
        .args(args)
        .env_remove("SUMMIT_DSN")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn t1() -> String {
    fixture("t1.csv").display().to_string()
}

#[test]
fn summarize_table_lists_top_singletons() {
    let o = summit(&["summarize", "--csv", &t1(), "--k", "2", "--L", "2", "--D", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains("a1  b1") && rows[0].contains("10.0000"), "{text}");
    assert!(rows[1].contains("a1  b2") && rows[1].contains("8.0000"), "{text}");
}

#[test]
fn expand_shows_member_ranks() {
    let o = summit(&["summarize", "--csv", &t1(), "--k", "1", "--L", "2", "--D", "0", "--expand"]);
    let text = stdout(&o);
    assert!(text.contains("a1  *"));
    let members: Vec<&str> = text.lines().filter(|l| l.contains('*') && l.contains("b")).collect();
    assert!(members.iter().any(|l| l.trim_start().starts_with("1*")), "{text}");
    assert!(members.iter().any(|l| l.trim_start().starts_with("2*")), "{text}");
}

#[test]
fn json_output_is_canonical() {
    let o = summit(&["summarize", "--csv", &t1(), "--k", "2", "--L", "2", "--D", "0", "--format", "json"]);
    let text = stdout(&o);
    let body = text.trim_end();
    assert_eq!(summit_core::payload::canonicalize(body).unwrap(), body);
    let v: Value = serde_json::from_str(body).unwrap();
    assert_eq!(v["clusters"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let csv = t1();
    let conflict = summit(&["summarize", "--csv", &csv, "--dsn", "sqlite:x.db", "--k", "1", "--L", "1", "--D", "0"]);
    assert_eq!(conflict.status.code(), Some(2));
    let bad_d = summit(&["summarize", "--csv", &csv, "--k", "1", "--L", "1", "--D", "9"]);
    assert_eq!(bad_d.status.code(), Some(2));
    let no_input = summit(&["summarize", "--k", "1", "--L", "1", "--D", "0"]);
    assert_eq!(no_input.status.code(), Some(2));
    let bad_algo = summit(&["summarize", "--csv", &csv, "--k", "1", "--L", "1", "--D", "0", "--algo", "nope"]);
    assert_eq!(bad_algo.status.code(), Some(2));
    let missing = summit(&["summarize", "--csv", "/definitely/not/here.csv", "--k", "1", "--L", "1", "--D", "0"]);
    assert_eq!(missing.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let corrupt = dir.path().join("bad.summit");
    std::fs::write(&corrupt, "summit-store\t1\nl\t2\n").unwrap();
    let o = summit(&["guidance", "--store", corrupt.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    for o in [&conflict, &bad_d, &missing] {
        assert!(!String::from_utf8_lossy(&o.stderr).contains("panicked"));
    }
}

#[test]
fn guidance_csv_has_one_row_per_point() {
    let o = summit(&["guidance", "--csv", &t1(), "--L", "2", "--k-min", "1", "--k-max", "3", "--d-min", "0", "--d-max", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("D,k,objective"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn precompute_then_guidance_from_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("sales.summit");
    let csv = fixture("sales.csv").display().to_string();
    let o = summit(&[
        "precompute", "--csv", &csv, "--L", "8", "--k-min", "1", "--k-max", "6", "--d-max", "3", "--out",
        store.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let from_store = summit(&["guidance", "--csv", &csv, "--store", store.to_str().unwrap(), "--format", "json"]);
    let fresh = summit(&[
        "guidance", "--csv", &csv, "--L", "8", "--k-min", "1", "--k-max", "6", "--d-max", "3", "--format", "json",
    ]);
    assert_eq!(stdout(&from_store), stdout(&fresh));
    let other = summit(&["guidance", "--csv", &t1(), "--store", store.to_str().unwrap()]);
    assert_eq!(other.status.code(), Some(1));

    // previous solution taken from the store snapshot
    let o = summit(&[
        "compare", "--csv", &csv, "--store", store.to_str().unwrap(), "--prev", "4,8,1", "--cur", "3,8,1",
        "--phase-a-budget", "12",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["old"].as_array().unwrap().len(), 4);
}

#[test]
fn compare_with_itself() {
    let o = summit(&["compare", "--csv", &t1(), "--prev", "2,2,0", "--cur", "2,2,0"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total_cost"], 0);
    // overlapping clusters put weight off the diagonal; keeping the old
    // order is then an upper bound rather than zero
    let csv = fixture("sales.csv").display().to_string();
    let o = summit(&["compare", "--csv", &csv, "--prev", "5,10,1", "--cur", "5,10,1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let m: Vec<Vec<i64>> = serde_json::from_value(v["M"].clone()).unwrap();
    let p_a: Vec<i64> = serde_json::from_value(v["p_a"].clone()).unwrap();
    let same_order: i64 = (0..m.len())
        .flat_map(|i| (0..m.len()).map(move |j| (i, j)))
        .map(|(i, j)| m[i][j] * (p_a[i] - p_a[j]).abs())
        .sum();
    assert!(v["total_cost"].as_i64().unwrap() <= same_order);
    let table = summit(&["compare", "--csv", &csv, "--prev", "6,10,1", "--cur", "3,10,1", "--format", "table"]);
    assert!(stdout(&table).starts_with("crossing cost"));
}

#[test]
fn oracle_on_t1() {
    let o = summit(&["oracle", "--csv", &t1(), "--k", "1", "--L", "2", "--D", "0"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["optimal"]["objective"].as_f64(), Some(9.0));
    assert_eq!(v["optimal"]["clusters"][0]["pattern"], serde_json::json!(["a1", "*"]));
    let limited = summit(&["oracle", "--csv", &t1(), "--k", "2", "--L", "2", "--D", "0", "--max-subsets", "3"]);
    assert_eq!(limited.status.code(), Some(2));
}

#[test]
fn sqlite_input_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("t1.db");
    let made = Command::new("python3")
        .arg("-c")
        .arg(format!(
            "import sqlite3; c=sqlite3.connect({:?}); c.execute('create table t(A text, B text, val real)'); \
             c.executemany('insert into t values (?,?,?)', [('a1','b1',10),('a1','b2',8),('a2','b1',6),('a2','b2',0)]); c.commit()",
            db.display().to_string()
        ))
        .status();
    if !matches!(made, Ok(s) if s.success()) {
        eprintln!("python3 sqlite3 unavailable; skipping");
        return;
    }
    let args = ["--k", "2", "--L", "3", "--D", "1", "--format", "json"];
    let dsn = format!("sqlite:{}", db.display());
    let mut via_sql = vec!["summarize", "--dsn", &dsn, "--query", "SELECT A, B, val FROM t"];
    via_sql.extend(args);
    let csv = t1();
    let mut via_csv = vec!["summarize", "--csv", &csv];
    via_csv.extend(args);
    let a = summit(&via_sql);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&summit(&via_csv)));

    let from_env = Command::new(env!("CARGO_BIN_EXE_summit"))
        .args(["summarize", "--query", "SELECT A, B, val FROM t"])
        .args(args)
        .env("SUMMIT_DSN", &dsn)
        .output()
        .unwrap();
    assert_eq!(stdout(&from_env), stdout(&a));
    let unreachable = summit(&["summarize", "--dsn", "sqlite:/no/such/dir/x.db", "--query", "SELECT 1", "--k", "1", "--L", "1", "--D", "0"]);
    assert_eq!(unreachable.status.code(), Some(1));
}
