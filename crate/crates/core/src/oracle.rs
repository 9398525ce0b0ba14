//! Exhaustive solver over candidate subsets, used as ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoverageIndex, Dataset, Params, Solution};

pub const DEFAULT_MAX_SUBSETS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_subsets: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_subsets: DEFAULT_MAX_SUBSETS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    #[serde(skip)]
    pub optimal: Option<Solution>,
    /// Subsets covering all top-L rows (after distance and antichain pruning).
    pub feasible_count: u64,
    /// Subsets that survived distance and antichain pruning.
    pub evaluated_count: u64,
}

/// Number of subsets of size `1..=k` drawn from `c` items, saturating.
pub fn subset_count(c: usize, k: usize) -> u64 {
    let mut total: u64 = 0;
    let mut binom: u64 = 1;
    for i in 1..=k.min(c) {
        // C(c, i) = C(c, i-1) * (c - i + 1) / i
        binom = match binom.checked_mul((c - i + 1) as u64) {
            Some(v) => v / i as u64,
            None => return u64::MAX,
        };
        total = total.saturating_add(binom);
    }
    total
}

struct Search<'a> {
    ds: &'a Dataset,
    index: &'a CoverageIndex,
    params: Params,
    top_mask: Vec<bool>,
    cover_mult: Vec<u32>,
    top_covered: usize,
    chosen: Vec<u32>,
    best: Option<(f64, Vec<u32>)>,
    feasible: u64,
    evaluated: u64,
}

impl Search<'_> {
    fn compatible(&self, id: u32) -> bool {
        let c = self.index.cluster(id);
        self.chosen.iter().all(|&o| {
            let other = self.index.cluster(o);
            c.distance_unchecked(other) >= self.params.d
                && !c.covers_unchecked(other)
                && !other.covers_unchecked(c)
        })
    }

    fn push(&mut self, id: u32) {
        for &r in self.index.rows_of(id) {
            if self.cover_mult[r] == 0 && self.top_mask[r] {
                self.top_covered += 1;
            }
            self.cover_mult[r] += 1;
        }
        self.chosen.push(id);
    }

    fn pop(&mut self) {
        let id = self.chosen.pop().expect("non-empty");
        for &r in self.index.rows_of(id) {
            self.cover_mult[r] -= 1;
            if self.cover_mult[r] == 0 && self.top_mask[r] {
                self.top_covered -= 1;
            }
        }
    }

    fn evaluate(&mut self) {
        self.evaluated += 1;
        if self.top_covered < self.params.l {
            return;
        }
        self.feasible += 1;
        let (mut sum, mut cnt) = (0.0, 0usize);
        for r in 0..self.ds.n() {
            if self.cover_mult[r] > 0 {
                sum += self.ds.value(r);
                cnt += 1;
            }
        }
        let obj = sum / cnt as f64;
        if self.best.as_ref().is_none_or(|(b, _)| obj > *b) {
            self.best = Some((obj, self.chosen.clone()));
        }
    }

    fn dfs(&mut self, start: u32) {
        for id in start..self.index.len() as u32 {
            if !self.compatible(id) {
                continue;
            }
            self.push(id);
            self.evaluate();
            if self.chosen.len() < self.params.k {
                self.dfs(id + 1);
            }
            self.pop();
        }
    }
}

/// Best feasible subset of at most `k` candidates, enumerated in
/// lexicographic candidate order; the first of equal objectives wins.
pub fn brute_force(ds: &Dataset, params: Params, limits: OracleLimits) -> Result<OracleResult> {
    params.validate(ds)?;
    let index = CoverageIndex::generate(ds, params.l)?;
    let total = subset_count(index.len(), params.k);
    if total > limits.max_subsets {
        return Err(Error::Capacity(format!(
            "{} candidates with k={} give {total} subsets, limit is {}",
            index.len(),
            params.k,
            limits.max_subsets
        )));
    }
    let mut top_mask = vec![false; ds.n()];
    for &r in ds.top_l(params.l)? {
        top_mask[r] = true;
    }
    let mut search = Search {
        ds,
        index: &index,
        params,
        top_mask,
        cover_mult: vec![0; ds.n()],
        top_covered: 0,
        chosen: Vec::new(),
        best: None,
        feasible: 0,
        evaluated: 0,
    };
    search.dfs(0);
    let optimal = match search.best {
        Some((_, ids)) => {
            let clusters = ids.iter().map(|&id| index.cluster(id).clone()).collect();
            Some(Solution::from_clusters(ds, clusters, params)?)
        }
        None => None,
    };
    Ok(OracleResult { optimal, feasible_count: search.feasible, evaluated_count: search.evaluated })
}
