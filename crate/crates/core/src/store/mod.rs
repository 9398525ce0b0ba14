//! Batch precomputation over a `(k, D)` grid for one `L`.
//!
//! For each `D` the store runs the shared first phase once and then merges
//! greedily from the largest `k` down to the smallest, recording the state
//! at every integer `k`. Because a cluster that is merged away never comes
//! back, each cluster's lifetime is one contiguous `k` interval, so a
//! per-`D` interval tree holds every solution of the grid.

mod format;
mod interval_tree;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use crate::algorithms::{enforce_distance, hybrid_budget, hybrid_phase_a, reduce_to, AlgoParams, Algorithm, MergeState, Seeding};
use crate::error::{Error, Result};
use crate::model::{covered_union, Cluster, CoverageIndex, Dataset, Params, Solution};

pub use format::STORE_FORMAT_VERSION;
pub use interval_tree::{IntervalEntry, IntervalTree};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecomputeOptions {
    pub algorithm: Algorithm,
    pub hybrid_c: f64,
    pub seeding: Seeding,
}

impl Default for PrecomputeOptions {
    fn default() -> Self {
        PrecomputeOptions {
            algorithm: Algorithm::Hybrid,
            hybrid_c: crate::algorithms::DEFAULT_HYBRID_C,
            seeding: Seeding::None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildMeta {
    /// Cluster count when interval recording starts, per `D`.
    pub start_sizes: BTreeMap<usize, usize>,
    /// Wall time of each `D` chain in microseconds.
    pub timings_us: BTreeMap<usize, u64>,
}

/// Precomputed solutions for every `(k, D)` of a grid at fixed `L`.
#[derive(Clone, Debug)]
pub struct ParamStore {
    pub(crate) l: usize,
    pub(crate) m: usize,
    pub(crate) k_range: (usize, usize),
    pub(crate) d_range: (usize, usize),
    pub(crate) algorithm: Algorithm,
    pub(crate) hybrid_c: f64,
    pub(crate) seeding: Seeding,
    /// Fixed-order budget shared by every `k` (hybrid only).
    pub(crate) phase_a_budget: Option<usize>,
    pub(crate) fingerprint: String,
    pub(crate) trees: BTreeMap<usize, IntervalTree>,
    pub(crate) grid: BTreeMap<(usize, usize), f64>,
    pub(crate) meta: BuildMeta,
}

struct Chain {
    d: usize,
    entries: Vec<IntervalEntry>,
    objectives: Vec<(usize, f64)>,
    start_size: usize,
    micros: u64,
}

/// Build a store. Fixed-order runs are not incremental in `k` and are rejected.
pub fn precompute(
    ds: &Dataset,
    l: usize,
    k_range: (usize, usize),
    d_range: (usize, usize),
    opts: PrecomputeOptions,
) -> Result<ParamStore> {
    let (k_min, k_max) = k_range;
    let (d_min, d_max) = d_range;
    if k_min == 0 || k_min > k_max {
        return Err(Error::Range(format!("k range [{k_min}, {k_max}] must satisfy 1 <= min <= max")));
    }
    if d_min > d_max || d_max > ds.m() {
        return Err(Error::Range(format!("D range [{d_min}, {d_max}] must lie within [0, {}]", ds.m())));
    }
    if opts.algorithm == Algorithm::FixedOrder {
        return Err(Error::Parameter("fixed-order cannot be precomputed incrementally".into()));
    }
    let base = AlgoParams {
        k: k_max,
        l,
        d: d_min,
        seeding: opts.seeding,
        hybrid_c: opts.hybrid_c,
        phase_a_budget: None,
    };
    base.validate(ds)?;
    let phase_a_budget = match opts.algorithm {
        Algorithm::Hybrid => Some(hybrid_budget(k_max, opts.hybrid_c)),
        _ => None,
    };
    let index = CoverageIndex::generate(ds, l)?;

    let chains: Vec<Result<Chain>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (d_min..=d_max)
            .map(|d| {
                let index = &index;
                let params = AlgoParams { d, phase_a_budget, ..base };
                scope.spawn(move || build_chain(ds, index, opts.algorithm, &params, k_min))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });

    let mut trees = BTreeMap::new();
    let mut grid = BTreeMap::new();
    let mut meta = BuildMeta::default();
    for chain in chains {
        let chain = chain?;
        for (k, obj) in chain.objectives {
            grid.insert((chain.d, k), obj);
        }
        meta.start_sizes.insert(chain.d, chain.start_size);
        meta.timings_us.insert(chain.d, chain.micros);
        trees.insert(chain.d, IntervalTree::new(chain.entries));
    }
    Ok(ParamStore {
        l,
        m: ds.m(),
        k_range,
        d_range,
        algorithm: opts.algorithm,
        hybrid_c: opts.hybrid_c,
        seeding: opts.seeding,
        phase_a_budget,
        fingerprint: ds.fingerprint(),
        trees,
        grid,
        meta,
    })
}

fn build_chain(
    ds: &Dataset,
    index: &CoverageIndex,
    algo: Algorithm,
    params: &AlgoParams,
    k_min: usize,
) -> Result<Chain> {
    let started = Instant::now();
    let mut state = match algo {
        Algorithm::Hybrid => hybrid_phase_a(ds, index, params)?,
        _ => {
            let mut st = MergeState::with_top_singletons(ds, index)?;
            enforce_distance(&mut st, params.d)?;
            st
        }
    };
    let start_size = state.len();
    let k_max = params.k;

    // seq -> (cluster, k_hi)
    let mut open: HashMap<u64, (Cluster, usize)> = HashMap::new();
    let mut closed: HashSet<Cluster> = HashSet::new();
    let mut entries = Vec::new();
    let mut objectives = Vec::new();
    for k in (k_min..=k_max).rev() {
        reduce_to(&mut state, k, |_, _| {})?;
        let live: HashSet<u64> = state.live().iter().map(|lc| lc.seq).collect();
        let mut gone: Vec<u64> = open.keys().filter(|s| !live.contains(s)).copied().collect();
        gone.sort_unstable();
        for seq in gone {
            let (cluster, k_hi) = open.remove(&seq).expect("present");
            closed.insert(cluster.clone());
            entries.push(IntervalEntry { cluster, seq, k_lo: k + 1, k_hi });
        }
        for lc in state.live() {
            if open.contains_key(&lc.seq) {
                continue;
            }
            let cluster = index.cluster(lc.id).clone();
            if closed.contains(&cluster) {
                return Err(Error::Contract(format!(
                    "{cluster:?} reappeared at k={k} for D={} after being merged away",
                    params.d
                )));
            }
            open.insert(lc.seq, (cluster, k));
        }
        objectives.push((k, state.objective()));
    }
    let mut rest: Vec<_> = open.into_iter().collect();
    rest.sort_unstable_by_key(|(seq, _)| *seq);
    for (seq, (cluster, k_hi)) in rest {
        entries.push(IntervalEntry { cluster, seq, k_lo: k_min, k_hi });
    }
    entries.sort_by_key(|e| e.seq);
    Ok(Chain {
        d: params.d,
        entries,
        objectives,
        start_size,
        micros: started.elapsed().as_micros() as u64,
    })
}

impl ParamStore {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k_range(&self) -> (usize, usize) {
        self.k_range
    }

    pub fn d_range(&self) -> (usize, usize) {
        self.d_range
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn hybrid_c(&self) -> f64 {
        self.hybrid_c
    }

    pub fn seeding(&self) -> Seeding {
        self.seeding
    }

    pub fn phase_a_budget(&self) -> Option<usize> {
        self.phase_a_budget
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn meta(&self) -> &BuildMeta {
        &self.meta
    }

    pub fn tree(&self, d: usize) -> Option<&IntervalTree> {
        self.trees.get(&d)
    }

    /// Heuristic parameters that reproduce the recorded run at `(k, D)`.
    pub fn run_params(&self, k: usize, d: usize) -> AlgoParams {
        AlgoParams {
            k,
            l: self.l,
            d,
            seeding: self.seeding,
            hybrid_c: self.hybrid_c,
            phase_a_budget: self.phase_a_budget,
        }
    }

    fn check(&self, k: usize, d: usize) -> Result<()> {
        let (k_min, k_max) = self.k_range;
        let (d_min, d_max) = self.d_range;
        if k < k_min || k > k_max {
            return Err(Error::Range(format!("k={k} outside [{k_min}, {k_max}]")));
        }
        if d < d_min || d > d_max {
            return Err(Error::Range(format!("D={d} outside [{d_min}, {d_max}]")));
        }
        Ok(())
    }

    /// Clusters live at `(k, D)`, in creation order.
    pub fn clusters_at(&self, k: usize, d: usize) -> Result<Vec<Cluster>> {
        self.check(k, d)?;
        let tree = self.trees.get(&d).ok_or_else(|| Error::CorruptStore(format!("no tree for D={d}")))?;
        Ok(tree.stab(k).into_iter().map(|e| e.cluster.clone()).collect())
    }

    pub fn objective_at(&self, k: usize, d: usize) -> Result<f64> {
        self.check(k, d)?;
        self.grid
            .get(&(d, k))
            .copied()
            .ok_or_else(|| Error::CorruptStore(format!("no grid point for k={k}, D={d}")))
    }

    /// The recorded solution at `(k, D)`.
    pub fn retrieve(&self, ds: &Dataset, k: usize, d: usize) -> Result<Solution> {
        if ds.fingerprint() != self.fingerprint {
            return Err(Error::StoreMismatch);
        }
        let clusters = self.clusters_at(k, d)?;
        let objective = self.objective_at(k, d)?;
        let covered = covered_union(&clusters, ds);
        Ok(Solution {
            clusters,
            params: Params::new(k, self.l, d),
            covered,
            objective,
            collapsed_to_trivial: false,
        })
    }

    /// Objective series per `D`, ascending in `k`.
    pub fn guidance_matrix(&self) -> BTreeMap<usize, Vec<(usize, f64)>> {
        let mut out: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        for (&(d, k), &obj) in &self.grid {
            out.entry(d).or_default().push((k, obj));
        }
        out
    }

    /// Every `(cluster, D)` has exactly one interval.
    pub fn verify_continuity(&self) -> Result<()> {
        for (&d, tree) in &self.trees {
            let mut seen = HashSet::new();
            for e in tree.entries() {
                if e.k_lo > e.k_hi {
                    return Err(Error::Contract(format!("empty interval for {:?} at D={d}", e.cluster)));
                }
                if !seen.insert(&e.cluster) {
                    return Err(Error::Contract(format!("{:?} has two intervals at D={d}", e.cluster)));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, format::write(self))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<ParamStore> {
        let text = std::fs::read_to_string(path)?;
        format::read(&text)
    }

    pub fn to_text(&self) -> String {
        format::write(self)
    }

    pub fn from_text(text: &str) -> Result<ParamStore> {
        format::read(text)
    }
}
