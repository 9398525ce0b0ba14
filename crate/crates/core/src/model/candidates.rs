use std::collections::HashMap;

use super::cluster::{Cluster, Slot};
use super::dataset::Dataset;
use crate::error::{Error, Result};

/// Default cap on attribute count for candidate generation.
pub const DEFAULT_MAX_M: usize = 16;

/// Dense identifier of a candidate cluster inside one [`CoverageIndex`].
pub type CandidateId = u32;

/// Every ancestor of a top-L element, with cluster-to-row and row-to-cluster
/// coverage maps.
///
/// Any LCA of two candidates is again an ancestor of a top-L element, so the
/// merge heuristics never leave this universe.
#[derive(Clone, Debug)]
pub struct CoverageIndex {
    l: usize,
    candidates: Vec<Cluster>,
    ids: HashMap<Cluster, CandidateId>,
    rows: Vec<Vec<usize>>,
    per_row: Vec<Vec<CandidateId>>,
}

impl CoverageIndex {
    /// Candidate set for the top-`l` rows, capped at [`DEFAULT_MAX_M`] attributes.
    pub fn generate(ds: &Dataset, l: usize) -> Result<CoverageIndex> {
        Self::generate_with_limit(ds, l, DEFAULT_MAX_M)
    }

    pub fn generate_with_limit(ds: &Dataset, l: usize, max_m: usize) -> Result<CoverageIndex> {
        let m = ds.m();
        if m > max_m || m > 31 {
            return Err(Error::Capacity(format!(
                "{m} attributes exceeds the candidate limit of {}",
                max_m.min(31)
            )));
        }
        let top = ds.top_l(l)?;
        let masks = 1u32 << m;

        // candidates in generation order: top-L rank order, then mask order
        let mut candidates = Vec::new();
        let mut ids = HashMap::new();
        for &r in top {
            let codes = &ds.row(r).codes;
            for mask in 0..masks {
                let c = Cluster::masked(codes, mask);
                if !ids.contains_key(&c) {
                    ids.insert(c.clone(), candidates.len() as CandidateId);
                    candidates.push(c);
                }
            }
        }

        let mut rows = vec![Vec::new(); candidates.len()];
        let mut per_row = vec![Vec::new(); ds.n()];
        let mut buf = vec![Slot::Star; m];
        for (r, own) in per_row.iter_mut().enumerate() {
            let codes = &ds.row(r).codes;
            for mask in 0..masks {
                for (i, s) in buf.iter_mut().enumerate() {
                    *s = if mask >> i & 1 == 1 { Slot::Star } else { Slot::Concrete(codes[i]) };
                }
                if let Some(&id) = ids.get(buf.as_slice()) {
                    rows[id as usize].push(r);
                    own.push(id);
                }
            }
            own.sort_unstable();
        }
        Ok(CoverageIndex { l, candidates, ids, rows, per_row })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Cluster] {
        &self.candidates
    }

    pub fn cluster(&self, id: CandidateId) -> &Cluster {
        &self.candidates[id as usize]
    }

    pub fn id_of(&self, c: &Cluster) -> Option<CandidateId> {
        self.ids.get(c).copied()
    }

    /// Sorted rows covered by candidate `id`.
    pub fn rows_of(&self, id: CandidateId) -> &[usize] {
        &self.rows[id as usize]
    }

    /// Candidates covering row `r`, ascending by id.
    pub fn candidates_of_row(&self, r: usize) -> &[CandidateId] {
        &self.per_row[r]
    }
}
