use std::collections::HashMap;

use sha2::{Digest, Sha256};

use super::cluster::{Cluster, Code, Slot};
use crate::error::{Error, Result};

/// Bidirectional map between raw attribute strings and dense codes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    values: Vec<String>,
    index: HashMap<String, Code>,
}

impl Dictionary {
    /// Code for `raw`, allocating the next dense code on first sight.
    pub fn intern(&mut self, raw: &str) -> Code {
        if let Some(&code) = self.index.get(raw) {
            return code;
        }
        let code = self.values.len() as Code;
        self.values.push(raw.to_owned());
        self.index.insert(raw.to_owned(), code);
        code
    }

    pub fn code(&self, raw: &str) -> Option<Code> {
        self.index.get(raw).copied()
    }

    pub fn value(&self, code: Code) -> Option<&str> {
        self.values.get(code as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One original tuple of the aggregate query output.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub codes: Box<[Code]>,
    pub value: f64,
}

/// Query output before dictionary encoding. Value cells are still text so
/// every source goes through the same numeric parse.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawTable {
    pub attr_names: Vec<String>,
    pub rows: Vec<RawRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawRow {
    pub attrs: Vec<String>,
    pub value: String,
}

/// Dictionary-encoded aggregate query output.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    attr_names: Vec<String>,
    dicts: Vec<Dictionary>,
    rows: Vec<Element>,
    /// Row indices sorted by value descending, ties by input order.
    rank: Vec<usize>,
    /// Inverse of `rank`.
    rank_pos: Vec<usize>,
}

impl Dataset {
    /// Encode a raw table. Rejects ragged rows, non-finite or non-numeric
    /// values, and (unless `allow_duplicates`) repeated attribute tuples.
    pub fn encode(raw: &RawTable, allow_duplicates: bool) -> Result<Dataset> {
        let m = raw.attr_names.len();
        if m == 0 {
            return Err(Error::Shape("at least one attribute column is required".into()));
        }
        if raw.rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut dicts = vec![Dictionary::default(); m];
        let mut rows = Vec::with_capacity(raw.rows.len());
        let mut seen: HashMap<Box<[Code]>, usize> = HashMap::new();
        for (i, r) in raw.rows.iter().enumerate() {
            let row_no = i + 1;
            if r.attrs.len() != m {
                return Err(Error::Ingest {
                    row: row_no,
                    message: format!("expected {m} attribute cells, found {}", r.attrs.len()),
                });
            }
            let value = parse_value(&r.value).ok_or_else(|| Error::Ingest {
                row: row_no,
                message: format!("value {:?} is not a finite number", r.value),
            })?;
            let codes: Box<[Code]> =
                r.attrs.iter().zip(dicts.iter_mut()).map(|(a, d)| d.intern(a)).collect();
            if !allow_duplicates {
                if let Some(&first) = seen.get(&codes) {
                    return Err(Error::DuplicateRow { row: row_no, first });
                }
                seen.insert(codes.clone(), row_no);
            }
            rows.push(Element { codes, value });
        }
        Ok(Self::from_parts(raw.attr_names.clone(), dicts, rows))
    }

    fn from_parts(attr_names: Vec<String>, dicts: Vec<Dictionary>, rows: Vec<Element>) -> Dataset {
        let mut rank: Vec<usize> = (0..rows.len()).collect();
        // stable sort keeps input order among equal values
        rank.sort_by(|&a, &b| rows[b].value.total_cmp(&rows[a].value));
        let mut rank_pos = vec![0; rows.len()];
        for (pos, &r) in rank.iter().enumerate() {
            rank_pos[r] = pos;
        }
        Dataset { attr_names, dicts, rows, rank, rank_pos }
    }

    pub fn m(&self) -> usize {
        self.attr_names.len()
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn attr_names(&self) -> &[String] {
        &self.attr_names
    }

    pub fn dicts(&self) -> &[Dictionary] {
        &self.dicts
    }

    pub fn rows(&self) -> &[Element] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &Element {
        &self.rows[r]
    }

    #[inline]
    pub fn value(&self, r: usize) -> f64 {
        self.rows[r].value
    }

    pub fn rank(&self) -> &[usize] {
        &self.rank
    }

    /// 1-based global rank of row `r`.
    pub fn rank_of(&self, r: usize) -> usize {
        self.rank_pos[r] + 1
    }

    /// Whether row `r` is among the `l` highest-ranked rows.
    pub fn in_top(&self, r: usize, l: usize) -> bool {
        self.rank_pos[r] < l
    }

    /// First `l` entries of the ranking.
    pub fn top_l(&self, l: usize) -> Result<&[usize]> {
        if l == 0 || l > self.n() {
            return Err(Error::Parameter(format!("L must be in [1, {}], got {l}", self.n())));
        }
        Ok(&self.rank[..l])
    }

    pub fn singleton(&self, r: usize) -> Cluster {
        Cluster::singleton(&self.rows[r].codes)
    }

    /// Decode a cluster into raw strings, `*` for wildcards.
    pub fn decode(&self, cluster: &Cluster) -> Result<Vec<String>> {
        if cluster.m() != self.m() {
            return Err(Error::Dimension { left: cluster.m(), right: self.m() });
        }
        cluster
            .slots()
            .iter()
            .zip(&self.dicts)
            .map(|(s, d)| match *s {
                Slot::Star => Ok("*".to_owned()),
                Slot::Concrete(c) => d
                    .value(c)
                    .map(str::to_owned)
                    .ok_or_else(|| Error::Parameter(format!("code {c} not in dictionary"))),
            })
            .collect()
    }

    /// Parse a pattern of raw strings (`*` for wildcard) into a cluster.
    pub fn parse_pattern<S: AsRef<str>>(&self, pattern: &[S]) -> Result<Cluster> {
        if pattern.len() != self.m() {
            return Err(Error::Dimension { left: pattern.len(), right: self.m() });
        }
        let slots = pattern
            .iter()
            .zip(&self.dicts)
            .map(|(p, d)| match p.as_ref() {
                "*" => Ok(Slot::Star),
                raw => d
                    .code(raw)
                    .map(Slot::Concrete)
                    .ok_or_else(|| Error::Parameter(format!("unknown attribute value {raw:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cluster::from(slots))
    }

    /// Stable content hash over the encoded representation.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.m() as u64).to_le_bytes());
        for name in &self.attr_names {
            h.update((name.len() as u64).to_le_bytes());
            h.update(name.as_bytes());
        }
        for d in &self.dicts {
            h.update((d.len() as u64).to_le_bytes());
            for v in &d.values {
                h.update((v.len() as u64).to_le_bytes());
                h.update(v.as_bytes());
            }
        }
        for e in &self.rows {
            for c in e.codes.iter() {
                h.update(c.to_le_bytes());
            }
            h.update(e.value.to_bits().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_value(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(rows: &[(&[&str], &str)]) -> RawTable {
        RawTable {
            attr_names: (0..rows[0].0.len()).map(|i| format!("A{i}")).collect(),
            rows: rows
                .iter()
                .map(|(a, v)| RawRow {
                    attrs: a.iter().map(|s| s.to_string()).collect(),
                    value: v.to_string(),
                })
                .collect(),
        }
    }

    #[test]
    fn single_row_round_trip() {
        let ds = Dataset::encode(&raw(&[(&["M", "Student"], "4.2")]), false).unwrap();
        assert_eq!(&*ds.row(0).codes, &[0, 0]);
        assert_eq!(ds.value(0), 4.2);
        assert_eq!(ds.decode(&ds.singleton(0)).unwrap(), vec!["M", "Student"]);
    }

    #[test]
    fn shared_value_shares_code() {
        let ds = Dataset::encode(&raw(&[(&["M", "x"], "1"), (&["M", "y"], "2")]), false).unwrap();
        assert_eq!(ds.row(0).codes[0], ds.row(1).codes[0]);
        assert_ne!(ds.row(0).codes[1], ds.row(1).codes[1]);
    }

    #[test]
    fn star_decodes_to_asterisk() {
        let ds = Dataset::encode(&raw(&[(&["M", "x"], "1")]), false).unwrap();
        assert_eq!(ds.decode(&Cluster::all_star(2)).unwrap(), vec!["*", "*"]);
        assert_eq!(ds.parse_pattern(&["M", "*"]).unwrap(), Cluster::masked(&[0, 0], 0b10));
    }

    #[test]
    fn rejects_bad_values() {
        let e = Dataset::encode(&raw(&[(&["a"], "1"), (&["b"], "abc")]), false).unwrap_err();
        assert!(matches!(e, Error::Ingest { row: 2, .. }), "{e}");
        assert!(Dataset::encode(&raw(&[(&["a"], "NaN")]), false).is_err());
        assert!(Dataset::encode(&raw(&[(&["a"], "inf")]), false).is_err());
    }

    #[test]
    fn duplicates_need_opt_in() {
        let t = raw(&[(&["a"], "1"), (&["a"], "2")]);
        assert!(matches!(
            Dataset::encode(&t, false),
            Err(Error::DuplicateRow { row: 2, first: 1 })
        ));
        assert_eq!(Dataset::encode(&t, true).unwrap().n(), 2);
    }

    #[test]
    fn rank_ties_follow_input_order() {
        let ds = Dataset::encode(
            &raw(&[(&["a"], "1"), (&["b"], "5"), (&["c"], "1"), (&["d"], "5")]),
            false,
        )
        .unwrap();
        assert_eq!(ds.rank(), &[1, 3, 0, 2]);
        assert_eq!(ds.rank_of(3), 2);
        assert!(ds.top_l(0).is_err());
        assert!(ds.top_l(5).is_err());
        assert_eq!(ds.top_l(4).unwrap().len(), 4);
    }

    #[test]
    fn fingerprint_is_deterministic() {
        let t = raw(&[(&["a", "x"], "1"), (&["b", "y"], "2")]);
        let a = Dataset::encode(&t, false).unwrap();
        let b = Dataset::encode(&t, false).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let mut t2 = t.clone();
        t2.rows[0].value = "1.5".into();
        assert_ne!(a.fingerprint(), Dataset::encode(&t2, false).unwrap().fingerprint());
    }
}
