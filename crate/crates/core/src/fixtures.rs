//! Small hand-built datasets shared by tests, docs, and the CLI demo.

use crate::model::{Dataset, RawRow, RawTable};

/// Four rows over two attributes: `(a1,b1)=10, (a1,b2)=8, (a2,b1)=6, (a2,b2)=0`.
pub fn t1_table() -> RawTable {
    let rows = [("a1", "b1", "10"), ("a1", "b2", "8"), ("a2", "b1", "6"), ("a2", "b2", "0")];
    RawTable {
        attr_names: vec!["A".into(), "B".into()],
        rows: rows
            .iter()
            .map(|(a, b, v)| RawRow { attrs: vec![a.to_string(), b.to_string()], value: v.to_string() })
            .collect(),
    }
}

pub fn t1() -> Dataset {
    Dataset::encode(&t1_table(), false).expect("fixture is valid")
}

/// Parameters of a random dataset with distinct rows.
#[derive(Clone, Copy, Debug)]
pub struct Synthetic {
    pub n: usize,
    pub m: usize,
    /// Distinct values per attribute. `domain^m` must be at least `n`.
    pub domain: usize,
    pub seed: u64,
}

/// Random rows whose values are a sum of per-attribute-value effects plus
/// noise, rounded to two decimals so that ties occur.
pub fn synthetic_table(spec: Synthetic) -> RawTable {
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    let Synthetic { n, m, domain, seed } = spec;
    assert!((domain as f64).powi(m as i32) >= n as f64, "domain too small for {n} distinct rows");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let effects: Vec<Vec<f64>> =
        (0..m).map(|_| (0..domain).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
    let mut seen = HashSet::new();
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let codes: Vec<usize> = (0..m).map(|_| rng.gen_range(0..domain)).collect();
        if !seen.insert(codes.clone()) {
            continue;
        }
        let base: f64 = codes.iter().enumerate().map(|(i, &c)| effects[i][c]).sum();
        let value = ((base + rng.gen_range(0.0..5.0)) * 100.0).round() / 100.0;
        rows.push(RawRow {
            attrs: codes.iter().enumerate().map(|(i, c)| format!("v{i}_{c}")).collect(),
            value: value.to_string(),
        });
    }
    RawTable { attr_names: (0..m).map(|i| format!("A{i}")).collect(), rows }
}

pub fn synthetic(spec: Synthetic) -> Dataset {
    Dataset::encode(&synthetic_table(spec), false).expect("synthetic rows are distinct")
}
