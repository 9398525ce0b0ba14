//! Loading query output from CSV files or a relational database.
//!
//! Every source produces a [`ResultSet`] of optional text cells which is
//! then shaped by [`IngestConfig`] and encoded, so the same rows give the
//! same [`Dataset`] whatever they came from.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{Dataset, RawRow, RawTable};

/// Environment variable holding the default database DSN.
pub const DSN_ENV: &str = "SUMMIT_DSN";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IngestConfig {
    pub value_column: String,
    /// Attribute columns in order; `None` takes every non-value column.
    pub attribute_columns: Option<Vec<String>>,
    pub l_default: Option<usize>,
    pub allow_duplicates: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            value_column: "val".into(),
            attribute_columns: None,
            l_default: None,
            allow_duplicates: false,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(attrs) = &self.attribute_columns {
            if attrs.contains(&self.value_column) {
                return Err(Error::Parameter(format!(
                    "value column {:?} is also listed as an attribute",
                    self.value_column
                )));
            }
            if attrs.is_empty() {
                return Err(Error::Parameter("attribute column list is empty".into()));
            }
        }
        Ok(())
    }
}

/// Column names plus rows of cells; `None` is SQL NULL.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

/// Anything that can run a query and hand back a result set.
pub trait RowSource {
    fn fetch(&mut self, query: &str) -> Result<ResultSet>;
}

/// Reads a CSV file and ignores the query. Stands in for a database in tests.
#[derive(Clone, Debug)]
pub struct CsvSource {
    path: PathBuf,
}

impl CsvSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        CsvSource { path: path.into() }
    }
}

impl RowSource for CsvSource {
    fn fetch(&mut self, _query: &str) -> Result<ResultSet> {
        let file = std::fs::File::open(&self.path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", self.path.display())))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(file);
        read_csv(&mut reader)
    }
}

fn read_csv<R: std::io::Read>(reader: &mut csv::Reader<R>) -> Result<ResultSet> {
    let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Ingest { row: i + 1, message: e.to_string() })?;
        rows.push(rec.iter().map(|c| Some(c.to_string())).collect());
    }
    Ok(ResultSet { columns, rows })
}

/// Shape a result set per `config` and encode it.
pub fn from_result_set(rs: &ResultSet, config: &IngestConfig) -> Result<Dataset> {
    config.validate()?;
    let find = |name: &str| rs.columns.iter().position(|c| c == name);
    let value_idx = find(&config.value_column)
        .ok_or_else(|| Error::Shape(format!("value column {:?} not found", config.value_column)))?;
    if rs.columns.iter().filter(|c| **c == config.value_column).count() > 1 {
        return Err(Error::Shape(format!("value column {:?} appears twice", config.value_column)));
    }
    let attr_idx: Vec<usize> = match &config.attribute_columns {
        Some(names) => names
            .iter()
            .map(|n| find(n).ok_or_else(|| Error::Shape(format!("attribute column {n:?} not found"))))
            .collect::<Result<_>>()?,
        None => (0..rs.columns.len()).filter(|&i| i != value_idx).collect(),
    };
    if attr_idx.is_empty() {
        return Err(Error::Shape("at least one attribute column is required".into()));
    }
    if rs.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rows = Vec::with_capacity(rs.rows.len());
    for (i, row) in rs.rows.iter().enumerate() {
        let row_no = i + 1;
        if row.len() != rs.columns.len() {
            return Err(Error::Ingest {
                row: row_no,
                message: format!("expected {} cells, found {}", rs.columns.len(), row.len()),
            });
        }
        let cell = |j: usize| {
            row[j].clone().ok_or_else(|| Error::Ingest {
                row: row_no,
                message: format!("column {:?} is null", rs.columns[j]),
            })
        };
        rows.push(RawRow {
            attrs: attr_idx.iter().map(|&j| cell(j)).collect::<Result<_>>()?,
            value: cell(value_idx)?,
        });
    }
    let raw = RawTable {
        attr_names: attr_idx.iter().map(|&j| rs.columns[j].clone()).collect(),
        rows,
    };
    Dataset::encode(&raw, config.allow_duplicates)
}

pub fn load_from(source: &mut dyn RowSource, query: &str, config: &IngestConfig) -> Result<Dataset> {
    let rs = source.fetch(query)?;
    from_result_set(&rs, config)
}

pub fn load_csv(path: impl AsRef<Path>, config: &IngestConfig) -> Result<Dataset> {
    load_from(&mut CsvSource::new(path.as_ref()), "", config)
}

pub fn load_csv_reader<R: std::io::Read>(reader: R, config: &IngestConfig) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    from_result_set(&read_csv(&mut reader)?, config)
}

/// First `l` rows by rank.
pub fn rank_top_l(ds: &Dataset, l: usize) -> Result<Vec<usize>> {
    Ok(ds.top_l(l)?.to_vec())
}

#[cfg(feature = "sqlite")]
pub use self::sqlite::{load_sql, SqliteSource};

#[cfg(feature = "sqlite")]
mod sqlite {
    use rusqlite::types::ValueRef;
    use rusqlite::{Connection, OpenFlags};

    use super::*;

    /// Read-only SQLite connection. Accepts `sqlite:<path>`, `sqlite://<path>`
    /// or a bare path.
    pub struct SqliteSource {
        conn: Connection,
    }

    impl SqliteSource {
        pub fn connect(dsn: &str) -> Result<Self> {
            let path = if let Some(rest) = dsn.strip_prefix("sqlite://") {
                rest
            } else if let Some(rest) = dsn.strip_prefix("sqlite:") {
                rest
            } else if dsn.contains("://") {
                return Err(Error::Connection(format!("unsupported DSN scheme in {dsn:?}")));
            } else {
                dsn
            };
            let conn = Connection::open_with_flags(
                path,
                OpenFlags::SQLITE_OPEN_READ_ONLY | OpenFlags::SQLITE_OPEN_NO_MUTEX,
            )
            .map_err(|e| Error::Connection(format!("{path}: {e}")))?;
            // opening is lazy; touch the schema so a bad file fails here
            conn.query_row("SELECT count(*) FROM sqlite_master", [], |r| r.get::<_, i64>(0))
                .map_err(|e| Error::Connection(format!("{path}: {e}")))?;
            Ok(SqliteSource { conn })
        }
    }

    fn cell(v: ValueRef<'_>) -> Option<String> {
        match v {
            ValueRef::Null => None,
            ValueRef::Integer(i) => Some(i.to_string()),
            ValueRef::Real(f) => Some(f.to_string()),
            ValueRef::Text(t) | ValueRef::Blob(t) => Some(String::from_utf8_lossy(t).into_owned()),
        }
    }

    impl RowSource for SqliteSource {
        fn fetch(&mut self, query: &str) -> Result<ResultSet> {
            let q = |e: rusqlite::Error| Error::Shape(format!("query failed: {e}"));
            let mut stmt = self.conn.prepare(query).map_err(q)?;
            let columns: Vec<String> = stmt.column_names().into_iter().map(str::to_string).collect();
            let width = columns.len();
            let mut rows = Vec::new();
            let mut cursor = stmt.query([]).map_err(q)?;
            while let Some(row) = cursor.next().map_err(q)? {
                let cells = (0..width).map(|j| row.get_ref(j).map(cell)).collect::<rusqlite::Result<_>>().map_err(q)?;
                rows.push(cells);
            }
            Ok(ResultSet { columns, rows })
        }
    }

    /// Run `query` verbatim against `dsn` and encode the result.
    pub fn load_sql(dsn: &str, query: &str, config: &IngestConfig) -> Result<Dataset> {
        let mut src = SqliteSource::connect(dsn)?;
        load_from(&mut src, query, config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_ds(text: &str) -> Result<Dataset> {
        load_csv_reader(text.as_bytes(), &IngestConfig::default())
    }

    #[test]
    fn minimal_csv() {
        let ds = csv_ds("A,val\nx,1.5\n").unwrap();
        assert_eq!((ds.m(), ds.n()), (1, 1));
        assert_eq!(ds.value(0), 1.5);
    }

    #[test]
    fn t1_rank() {
        let ds = csv_ds("A,B,val\na2,b1,6\na1,b1,10\na2,b2,0\na1,b2,8\n").unwrap();
        assert_eq!(ds.rank(), &[1, 3, 0, 2]);
        assert_eq!(rank_top_l(&ds, 2).unwrap(), vec![1, 3]);
        assert_eq!(rank_top_l(&ds, 4).unwrap().len(), 4);
        assert!(rank_top_l(&ds, 0).is_err());
    }

    #[test]
    fn bad_value_names_row() {
        let err = csv_ds("A,val\nx,1\ny,abc\n").unwrap_err();
        assert!(matches!(err, Error::Ingest { row: 2, .. }), "{err}");
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn missing_value_column_and_ragged_rows() {
        assert!(matches!(csv_ds("A,score\nx,1\n"), Err(Error::Shape(_))));
        assert!(matches!(csv_ds("A,val\nx,1,2\n"), Err(Error::Ingest { row: 1, .. })));
        assert!(matches!(csv_ds("A,val\n"), Err(Error::EmptyDataset)));
        assert!(matches!(csv_ds("val\n1\n"), Err(Error::Shape(_))));
    }

    #[test]
    fn duplicates_and_explicit_columns() {
        assert!(matches!(csv_ds("A,val\nx,1\nx,2\n"), Err(Error::DuplicateRow { row: 2, first: 1 })));
        let cfg = IngestConfig {
            value_column: "score".into(),
            attribute_columns: Some(vec!["B".into()]),
            allow_duplicates: true,
            ..Default::default()
        };
        let ds = load_csv_reader("A,B,score\n1,x,3\n2,x,4\n".as_bytes(), &cfg).unwrap();
        assert_eq!(ds.attr_names(), &["B".to_string()]);
        assert_eq!(ds.n(), 2);
        let bad = IngestConfig { attribute_columns: Some(vec!["val".into()]), ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::Parameter(_))));
    }

    #[test]
    fn quoted_cells() {
        let ds = csv_ds("A,val\n\"x, y\",2\n").unwrap();
        assert_eq!(ds.dicts()[0].value(0), Some("x, y"));
    }

    #[test]
    fn null_cell_is_rejected() {
        let rs = ResultSet {
            columns: vec!["A".into(), "val".into()],
            rows: vec![vec![None, Some("1".into())]],
        };
        assert!(matches!(from_result_set(&rs, &IngestConfig::default()), Err(Error::Ingest { row: 1, .. })));
    }
}
