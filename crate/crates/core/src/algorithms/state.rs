use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{CandidateId, Cluster, CoverageIndex, Dataset, Params, Solution};

/// A live cluster and its creation sequence number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiveCluster {
    pub id: CandidateId,
    pub seq: u64,
}

/// What one insertion or merge changed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mutation {
    pub added: Option<LiveCluster>,
    pub removed: Vec<LiveCluster>,
}

/// Marginal (sum, count) of a candidate against the covered set as it stood
/// at round `at_round`.
#[derive(Clone, Copy, Debug)]
struct Delta {
    sum: f64,
    cnt: usize,
    at_round: Option<u64>,
}

const STALE: Delta = Delta { sum: 0.0, cnt: 0, at_round: None };

/// Working solution of a greedy merge run.
///
/// Every mutation (insertion or merge) is one round. The rows newly covered
/// by the latest round are kept as the diff list so candidate deltas that
/// were refreshed one round earlier can be brought up to date by scanning
/// only the diff.
pub struct MergeState<'a> {
    ds: &'a Dataset,
    index: &'a CoverageIndex,
    live: Vec<LiveCluster>,
    next_seq: u64,
    covered: Vec<bool>,
    covered_count: usize,
    covered_sum: f64,
    round: u64,
    diff: Vec<usize>,
    deltas: Vec<Delta>,
    lca_cache: HashMap<(CandidateId, CandidateId), CandidateId>,
}

impl<'a> MergeState<'a> {
    pub fn new(ds: &'a Dataset, index: &'a CoverageIndex) -> Self {
        MergeState {
            ds,
            index,
            live: Vec::new(),
            next_seq: 0,
            covered: vec![false; ds.n()],
            covered_count: 0,
            covered_sum: 0.0,
            round: 0,
            diff: Vec::new(),
            deltas: vec![STALE; index.len()],
            lca_cache: HashMap::new(),
        }
    }

    /// State holding one singleton per top-L element, in rank order.
    pub fn with_top_singletons(ds: &'a Dataset, index: &'a CoverageIndex) -> Result<Self> {
        let mut st = Self::new(ds, index);
        for &r in ds.top_l(index.l())? {
            if st.covered[r] {
                // identical duplicate row already represented
                continue;
            }
            let id = st.id_of(&ds.singleton(r))?;
            st.live.push(LiveCluster { id, seq: st.next_seq });
            st.next_seq += 1;
            st.cover_rows(id);
        }
        Ok(st)
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.ds
    }

    pub fn index(&self) -> &'a CoverageIndex {
        self.index
    }

    /// Live clusters in creation order.
    pub fn live(&self) -> &[LiveCluster] {
        &self.live
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn clusters(&self) -> Vec<Cluster> {
        self.live.iter().map(|lc| self.index.cluster(lc.id).clone()).collect()
    }

    pub fn cluster_at(&self, pos: usize) -> &'a Cluster {
        self.index.cluster(self.live[pos].id)
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Rows newly covered by the latest round.
    pub fn diff_list(&self) -> &[usize] {
        &self.diff
    }

    pub fn is_covered(&self, r: usize) -> bool {
        self.covered[r]
    }

    /// Sorted covered rows.
    pub fn covered_rows(&self) -> Vec<usize> {
        (0..self.covered.len()).filter(|&r| self.covered[r]).collect()
    }

    pub fn covered_count(&self) -> usize {
        self.covered_count
    }

    pub fn covered_sum(&self) -> f64 {
        self.covered_sum
    }

    /// Average value over the covered rows, 0 when nothing is covered.
    pub fn objective(&self) -> f64 {
        if self.covered_count == 0 {
            0.0
        } else {
            self.covered_sum / self.covered_count as f64
        }
    }

    pub fn id_of(&self, c: &Cluster) -> Result<CandidateId> {
        self.index.id_of(c).ok_or(Error::NotCandidate)
    }

    pub fn position_of(&self, c: &Cluster) -> Option<usize> {
        let id = self.index.id_of(c)?;
        self.live.iter().position(|lc| lc.id == id)
    }

    fn cover_rows(&mut self, id: CandidateId) {
        for &r in self.index.rows_of(id) {
            if !self.covered[r] {
                self.covered[r] = true;
                self.covered_count += 1;
                self.covered_sum += self.ds.value(r);
                self.diff.push(r);
            }
        }
    }

    /// Append `id`, drop every live cluster it covers, advance one round.
    fn add_cluster(&mut self, id: CandidateId) -> Mutation {
        let new = self.index.cluster(id);
        let index = self.index;
        let mut removed = Vec::new();
        self.live.retain(|lc| {
            if new.covers_unchecked(index.cluster(lc.id)) {
                removed.push(*lc);
                false
            } else {
                true
            }
        });
        let added = LiveCluster { id, seq: self.next_seq };
        self.next_seq += 1;
        self.live.push(added);
        self.round += 1;
        self.diff.clear();
        self.cover_rows(id);
        Mutation { added: Some(added), removed }
    }

    /// Insert a cluster that no live cluster covers.
    pub fn insert(&mut self, c: &Cluster) -> Result<Mutation> {
        let id = self.id_of(c)?;
        self.insert_id(id)
    }

    pub(crate) fn insert_id(&mut self, id: CandidateId) -> Result<Mutation> {
        let c = self.index.cluster(id);
        if self.live.iter().any(|lc| self.index.cluster(lc.id).covers_unchecked(c)) {
            return Err(Error::Contract(format!("{c:?} is already covered by a live cluster")));
        }
        Ok(self.add_cluster(id))
    }

    /// Candidate id of the LCA of two candidates.
    pub(crate) fn lca_id(&mut self, a: CandidateId, b: CandidateId) -> CandidateId {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&id) = self.lca_cache.get(&key) {
            return id;
        }
        let lca = self.index.cluster(a).lca_unchecked(self.index.cluster(b));
        let id = self
            .index
            .id_of(&lca)
            .expect("LCA of two candidates covers a top-L element");
        self.lca_cache.insert(key, id);
        id
    }

    /// Replace the clusters at positions `i` and `j` by their LCA, also
    /// removing every other live cluster the LCA covers.
    pub(crate) fn merge_positions(&mut self, i: usize, j: usize) -> Result<Mutation> {
        if i == j || i >= self.live.len() || j >= self.live.len() {
            return Err(Error::Contract(format!("cannot merge positions {i} and {j}")));
        }
        let id = self.lca_id(self.live[i].id, self.live[j].id);
        Ok(self.add_cluster(id))
    }

    /// Merge two live clusters.
    pub fn merge(&mut self, c1: &Cluster, c2: &Cluster) -> Result<Mutation> {
        if c1 == c2 {
            return Err(Error::Contract("merging a cluster with itself is a no-op".into()));
        }
        let i = self.position_of(c1).ok_or_else(|| Error::Contract(format!("{c1:?} is not live")))?;
        let j = self.position_of(c2).ok_or_else(|| Error::Contract(format!("{c2:?} is not live")))?;
        self.merge_positions(i, j)
    }

    /// Tentative objective after adding candidate `id`, each row counted once.
    ///
    /// The cached marginal is reused when it was computed this round, patched
    /// with the diff list when it is one round old, and rebuilt otherwise.
    pub(crate) fn delta_eval_id(&mut self, id: CandidateId) -> f64 {
        let entry = self.deltas[id as usize];
        let fresh = match entry.at_round {
            Some(at) if at == self.round => entry,
            Some(at) if at + 1 == self.round => {
                let c = self.index.cluster(id);
                let mut d = entry;
                for &r in &self.diff {
                    if c.covers_codes(&self.ds.row(r).codes) {
                        d.sum -= self.ds.value(r);
                        d.cnt -= 1;
                    }
                }
                d.at_round = Some(self.round);
                d
            }
            _ => {
                let mut d = Delta { sum: 0.0, cnt: 0, at_round: Some(self.round) };
                for &r in self.index.rows_of(id) {
                    if !self.covered[r] {
                        d.sum += self.ds.value(r);
                        d.cnt += 1;
                    }
                }
                d
            }
        };
        self.deltas[id as usize] = fresh;
        (self.covered_sum + fresh.sum) / (self.covered_count + fresh.cnt) as f64
    }

    pub fn delta_eval(&mut self, c: &Cluster) -> Result<f64> {
        let id = self.id_of(c)?;
        Ok(self.delta_eval_id(id))
    }

    /// Greedy step: among the given position pairs, merge the one whose LCA
    /// yields the highest tentative objective. Ties go to the pair with the
    /// smallest (older, younger) creation sequence.
    pub(crate) fn update_positions(&mut self, pairs: &[(usize, usize)]) -> Result<Mutation> {
        let mut best: Option<(f64, (u64, u64), usize, usize)> = None;
        for &(i, j) in pairs {
            let (a, b) = (self.live[i], self.live[j]);
            let lca = self.lca_id(a.id, b.id);
            let obj = self.delta_eval_id(lca);
            let key = (a.seq.min(b.seq), a.seq.max(b.seq));
            let better = match best {
                None => true,
                Some((bo, bk, _, _)) => obj > bo || (obj == bo && key < bk),
            };
            if better {
                best = Some((obj, key, i, j));
            }
        }
        let (_, _, i, j) = best.ok_or_else(|| Error::Contract("no candidate pairs to merge".into()))?;
        self.merge_positions(i, j)
    }

    pub fn update_solution(&mut self, pairs: &[(Cluster, Cluster)]) -> Result<Mutation> {
        let positions = pairs
            .iter()
            .map(|(a, b)| {
                let i = self.position_of(a).ok_or_else(|| Error::Contract(format!("{a:?} is not live")))?;
                let j = self.position_of(b).ok_or_else(|| Error::Contract(format!("{b:?} is not live")))?;
                if i == j {
                    return Err(Error::Contract("pair of identical clusters".into()));
                }
                Ok((i, j))
            })
            .collect::<Result<Vec<_>>>()?;
        self.update_positions(&positions)
    }

    /// Position pairs closer than `d`.
    pub(crate) fn close_pairs(&self, d: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.live.len() {
            for j in i + 1..self.live.len() {
                if self.cluster_at(i).distance_unchecked(self.cluster_at(j)) < d {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub(crate) fn all_pairs(&self) -> Vec<(usize, usize)> {
        let s = self.live.len();
        let mut out = Vec::with_capacity(s * s.saturating_sub(1) / 2);
        for i in 0..s {
            for j in i + 1..s {
                out.push((i, j));
            }
        }
        out
    }

    pub fn to_solution(&self, params: Params) -> Solution {
        Solution {
            clusters: self.clusters(),
            params,
            covered: self.covered_rows(),
            objective: self.objective(),
            collapsed_to_trivial: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t1;
    use crate::model::{Dataset, RawRow, RawTable};

    #[test]
    fn t1_merge_of_top_two() {
        let ds = t1();
        let idx = CoverageIndex::generate(&ds, 2).unwrap();
        let mut st = MergeState::with_top_singletons(&ds, &idx).unwrap();
        assert_eq!(st.len(), 2);
        st.merge(&ds.singleton(0), &ds.singleton(1)).unwrap();
        assert_eq!(st.clusters(), vec![ds.parse_pattern(&["a1", "*"]).unwrap()]);
        assert_eq!(st.covered_rows(), vec![0, 1]);
        assert_eq!(st.objective(), 9.0);
        assert!(st.diff_list().is_empty());
    }

    #[test]
    fn merge_self_is_error() {
        let ds = t1();
        let idx = CoverageIndex::generate(&ds, 2).unwrap();
        let mut st = MergeState::with_top_singletons(&ds, &idx).unwrap();
        assert!(st.merge(&ds.singleton(0), &ds.singleton(0)).is_err());
        assert!(st.update_solution(&[]).is_err());
    }

    #[test]
    fn merge_removes_other_covered_clusters() {
        let rows = [
            ("a1", "b2", "c1", "d1", "9"),
            ("a1", "b3", "c2", "d1", "8"),
            ("a1", "b3", "c3", "d2", "7"),
            ("a1", "b1", "c1", "d2", "6"),
            ("a2", "b1", "c1", "d1", "1"),
        ];
        let raw = RawTable {
            attr_names: vec!["A".into(), "B".into(), "C".into(), "D".into()],
            rows: rows
                .iter()
                .map(|r| RawRow {
                    attrs: vec![r.0.into(), r.1.into(), r.2.into(), r.3.into()],
                    value: r.4.into(),
                })
                .collect(),
        };
        let ds = Dataset::encode(&raw, false).unwrap();
        let idx = CoverageIndex::generate(&ds, 4).unwrap();
        let mut st = MergeState::with_top_singletons(&ds, &idx).unwrap();
        st.merge(&ds.singleton(1), &ds.singleton(2)).unwrap();
        let b3 = ds.parse_pattern(&["a1", "b3", "*", "*"]).unwrap();
        assert!(st.position_of(&b3).is_some());
        // (a1,b2,c1,d1) + (a1,b3,*,*) -> (a1,*,*,*), which also absorbs (a1,b1,c1,d2)
        let m = st.merge(&ds.singleton(0), &b3).unwrap();
        let top = ds.parse_pattern(&["a1", "*", "*", "*"]).unwrap();
        assert_eq!(st.clusters(), vec![top]);
        assert_eq!(m.removed.len(), 3);
    }

    #[test]
    fn delta_eval_formula_cases() {
        let ds = t1();
        let idx = CoverageIndex::generate(&ds, 2).unwrap();
        let mut st = MergeState::with_top_singletons(&ds, &idx).unwrap();
        // (a1,*) covers only rows already covered
        let a1 = ds.parse_pattern(&["a1", "*"]).unwrap();
        assert_eq!(st.delta_eval(&a1).unwrap(), 9.0);
        // (*,b1) adds row 2 (value 6): (18+6)/3
        let b1 = ds.parse_pattern(&["*", "b1"]).unwrap();
        assert_eq!(st.delta_eval(&b1).unwrap(), 8.0);
        // all star adds rows 2,3: (18+6+0)/4
        assert_eq!(st.delta_eval(&Cluster::all_star(2)).unwrap(), 6.0);
        assert!(st.delta_eval(&ds.singleton(3)).is_err());
    }

    #[test]
    fn update_solution_ties_prefer_oldest_pair() {
        // T1 with L=3: (e1,e2)->(a1,*) and (e1,e3)->(*,b1) both give 8
        let ds = t1();
        let idx = CoverageIndex::generate(&ds, 3).unwrap();
        let mut st = MergeState::with_top_singletons(&ds, &idx).unwrap();
        let (e1, e2, e3) = (ds.singleton(0), ds.singleton(1), ds.singleton(2));
        st.update_solution(&[(e2.clone(), e3.clone()), (e1.clone(), e3.clone()), (e1, e2)])
            .unwrap();
        let a1 = ds.parse_pattern(&["a1", "*"]).unwrap();
        assert_eq!(st.clusters(), vec![e3, a1]);
        assert_eq!(st.objective(), 8.0);
    }

    #[test]
    fn insert_rejects_covered_cluster() {
        let ds = t1();
        let idx = CoverageIndex::generate(&ds, 2).unwrap();
        let mut st = MergeState::new(&ds, &idx);
        st.insert(&ds.parse_pattern(&["a1", "*"]).unwrap()).unwrap();
        assert!(st.insert(&ds.singleton(0)).is_err());
        let m = st.insert(&Cluster::all_star(2)).unwrap();
        assert_eq!(m.removed.len(), 1);
        assert_eq!(st.objective(), 6.0);
        assert_eq!(st.diff_list(), &[2, 3]);
    }
}
