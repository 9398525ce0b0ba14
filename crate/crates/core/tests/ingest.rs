use std::io::Write;

use summit_core::ingest::{load_csv, load_from, load_sql, CsvSource, IngestConfig};
use summit_core::Error;

const T1: &str = "A,B,val\na1,b1,10\na1,b2,8\na2,b1,6\na2,b2,0\n";

fn sqlite_t1(path: &std::path::Path) {
    let conn = rusqlite::Connection::open(path).unwrap();
    conn.execute_batch(
        "CREATE TABLE sales (a TEXT, b TEXT, amount REAL);
         INSERT INTO sales VALUES ('a1','b1',4),('a1','b1',6),('a1','b2',8),('a2','b1',6),('a2','b2',0);",
    )
    .unwrap();
}

#[test]
fn csv_and_sql_give_identical_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t1.csv");
    std::fs::File::create(&csv_path).unwrap().write_all(T1.as_bytes()).unwrap();
    let db = dir.path().join("t1.db");
    sqlite_t1(&db);
    let cfg = IngestConfig::default();
    let from_csv = load_csv(&csv_path, &cfg).unwrap();
    let query = "SELECT a AS A, b AS B, sum(amount) AS val FROM sales GROUP BY a, b ORDER BY a, b";
    let from_sql = load_sql(&format!("sqlite:{}", db.display()), query, &cfg).unwrap();
    assert_eq!(from_csv, from_sql);
    assert_eq!(from_csv.fingerprint(), from_sql.fingerprint());
    assert_eq!(from_csv.rank(), &[0, 1, 2, 3]);
    let via_fake = load_from(&mut CsvSource::new(&csv_path), "ignored", &cfg).unwrap();
    assert_eq!(via_fake, from_csv);
}

#[test]
fn sql_errors() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("t1.db");
    sqlite_t1(&db);
    let dsn = db.display().to_string();
    let cfg = IngestConfig::default();
    let empty = load_sql(&dsn, "SELECT a AS A, amount AS val FROM sales WHERE amount > 100", &cfg);
    assert!(matches!(empty, Err(Error::EmptyDataset)));
    let missing = dir.path().join("nope.db").display().to_string();
    assert!(matches!(load_sql(&missing, "SELECT 1", &cfg), Err(Error::Connection(_))));
    assert!(matches!(load_sql("postgres://x/y", "SELECT 1", &cfg), Err(Error::Connection(_))));
    let shape = load_sql(&dsn, "SELECT a, b FROM sales", &cfg);
    assert!(matches!(shape, Err(Error::Shape(_))));
}

#[test]
fn permuting_ties_only_reorders_them() {
    let a = "A,val\nx,5\ny,5\nz,7\n";
    let b = "A,val\ny,5\nx,5\nz,7\n";
    let cfg = IngestConfig::default();
    let da = summit_core::ingest::load_csv_reader(a.as_bytes(), &cfg).unwrap();
    let db = summit_core::ingest::load_csv_reader(b.as_bytes(), &cfg).unwrap();
    let names = |ds: &summit_core::Dataset| {
        ds.rank().iter().map(|&r| ds.decode(&ds.singleton(r)).unwrap()[0].clone()).collect::<Vec<_>>()
    };
    assert_eq!(names(&da), ["z", "x", "y"]);
    assert_eq!(names(&db), ["z", "y", "x"]);
}
