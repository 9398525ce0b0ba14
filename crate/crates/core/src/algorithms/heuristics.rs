use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::seeding::{seed_clusters, Seeding};
use super::state::{MergeState, Mutation};
use crate::error::{Error, Result};
use crate::model::{Cluster, CoverageIndex, Dataset, Params, Solution};

pub const DEFAULT_HYBRID_C: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(rename = "bottomup")]
    BottomUp,
    #[serde(rename = "fixedorder")]
    FixedOrder,
    Hybrid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::BottomUp, Algorithm::FixedOrder, Algorithm::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BottomUp => "bottomup",
            Algorithm::FixedOrder => "fixedorder",
            Algorithm::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bottomup" => Ok(Algorithm::BottomUp),
            "fixedorder" => Ok(Algorithm::FixedOrder),
            "hybrid" => Ok(Algorithm::Hybrid),
            other => Err(Error::Parameter(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Parameters for one heuristic run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgoParams {
    pub k: usize,
    pub l: usize,
    pub d: usize,
    pub seeding: Seeding,
    /// Hybrid's fixed-order phase keeps up to `ceil(hybrid_c * k)` clusters.
    pub hybrid_c: f64,
    /// Overrides hybrid's fixed-order budget. Batch precomputation sets this
    /// so that every k on the grid shares one fixed-order phase.
    pub phase_a_budget: Option<usize>,
}

impl AlgoParams {
    pub fn new(k: usize, l: usize, d: usize) -> Self {
        AlgoParams {
            k,
            l,
            d,
            seeding: Seeding::None,
            hybrid_c: DEFAULT_HYBRID_C,
            phase_a_budget: None,
        }
    }

    pub fn with_seeding(mut self, seeding: Seeding) -> Self {
        self.seeding = seeding;
        self
    }

    pub fn params(&self) -> Params {
        Params::new(self.k, self.l, self.d)
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        self.params().validate(ds)?;
        if !(self.hybrid_c.is_finite() && self.hybrid_c > 1.0) {
            return Err(Error::Parameter(format!("hybrid c must be > 1, got {}", self.hybrid_c)));
        }
        if let Some(b) = self.phase_a_budget {
            if b < self.k {
                return Err(Error::Parameter(format!("fixed-order budget {b} is below k={}", self.k)));
            }
        }
        Ok(())
    }

    /// Cluster budget of hybrid's fixed-order phase.
    pub fn hybrid_budget(&self) -> usize {
        self.phase_a_budget
            .unwrap_or_else(|| hybrid_budget(self.k, self.hybrid_c))
    }
}

pub fn hybrid_budget(k: usize, c: f64) -> usize {
    ((k as f64) * c).ceil() as usize
}

fn check_index(index: &CoverageIndex, params: &AlgoParams) -> Result<()> {
    if index.l() != params.l {
        return Err(Error::Parameter(format!(
            "coverage index built for L={} used with L={}",
            index.l(),
            params.l
        )));
    }
    Ok(())
}

/// Run `algo` with a freshly generated candidate index.
pub fn summarize(ds: &Dataset, algo: Algorithm, params: &AlgoParams) -> Result<Solution> {
    params.validate(ds)?;
    let index = CoverageIndex::generate(ds, params.l)?;
    summarize_with(ds, &index, algo, params)
}

pub fn summarize_with(
    ds: &Dataset,
    index: &CoverageIndex,
    algo: Algorithm,
    params: &AlgoParams,
) -> Result<Solution> {
    match algo {
        Algorithm::BottomUp => bottom_up_with(ds, index, params),
        Algorithm::FixedOrder => fixed_order_with(ds, index, params),
        Algorithm::Hybrid => hybrid_with(ds, index, params),
    }
}

pub fn bottom_up(ds: &Dataset, params: &AlgoParams) -> Result<Solution> {
    summarize(ds, Algorithm::BottomUp, params)
}

pub fn fixed_order(ds: &Dataset, params: &AlgoParams) -> Result<Solution> {
    summarize(ds, Algorithm::FixedOrder, params)
}

pub fn hybrid(ds: &Dataset, params: &AlgoParams) -> Result<Solution> {
    summarize(ds, Algorithm::Hybrid, params)
}

/// Merge closest-violating pairs until every pair is at distance `>= d`.
/// Returns the number of merges.
pub fn enforce_distance(state: &mut MergeState<'_>, d: usize) -> Result<usize> {
    let mut merges = 0;
    loop {
        let pairs = state.close_pairs(d);
        if pairs.is_empty() {
            return Ok(merges);
        }
        state.update_positions(&pairs)?;
        merges += 1;
    }
}

/// Greedy all-pairs merging until at most `k` clusters remain, reporting
/// every merge to `on_merge`.
pub fn reduce_to<F>(state: &mut MergeState<'_>, k: usize, mut on_merge: F) -> Result<()>
where
    F: FnMut(&MergeState<'_>, &Mutation),
{
    while state.len() > k {
        let pairs = state.all_pairs();
        let m = state.update_positions(&pairs)?;
        on_merge(state, &m);
    }
    Ok(())
}

pub fn bottom_up_with(ds: &Dataset, index: &CoverageIndex, params: &AlgoParams) -> Result<Solution> {
    params.validate(ds)?;
    check_index(index, params)?;
    let mut state = MergeState::with_top_singletons(ds, index)?;
    let merges = enforce_distance(&mut state, params.d)?;
    let collapsed = merges > 0 && state.len() == 1 && state.cluster_at(0).is_all_star();
    reduce_to(&mut state, params.k, |_, _| {})?;
    let mut sol = state.to_solution(params.params());
    sol.collapsed_to_trivial = collapsed;
    Ok(sol)
}

/// Scan the seeds, then the top-L elements in rank order, keeping at most
/// `budget` pairwise-`d`-distant clusters.
pub fn fixed_order_phase<'a>(
    ds: &'a Dataset,
    index: &'a CoverageIndex,
    budget: usize,
    d: usize,
    seeds: &[Cluster],
) -> Result<MergeState<'a>> {
    let mut state = MergeState::new(ds, index);
    for seed in seeds {
        place_seed(&mut state, seed, budget, d)?;
    }
    for &r in ds.top_l(index.l())? {
        if state.is_covered(r) {
            continue;
        }
        let id = state.id_of(&ds.singleton(r))?;
        let t = index.cluster(id);
        let close: Vec<usize> = (0..state.len())
            .filter(|&p| state.cluster_at(p).distance_unchecked(t) < d)
            .collect();
        let under_budget = state.len() < budget;
        if under_budget && close.is_empty() {
            state.insert_id(id)?;
            continue;
        }
        state.insert_id(id)?;
        let tp = state.len() - 1;
        let pairs: Vec<(usize, usize)> = if under_budget {
            close.into_iter().map(|p| (p, tp)).collect()
        } else {
            (0..tp).map(|p| (p, tp)).collect()
        };
        state.update_positions(&pairs)?;
    }
    debug_assert!(state.close_pairs(d).is_empty());
    debug_assert!(state.len() <= budget);
    Ok(state)
}

/// A seed pattern may already be covered, may cover live clusters, or may
/// sit close to several of them; repair distance first, then size.
fn place_seed(state: &mut MergeState<'_>, seed: &Cluster, budget: usize, d: usize) -> Result<()> {
    let id = state.id_of(seed)?;
    if state.live().iter().any(|lc| state.index().cluster(lc.id).covers_unchecked(seed)) {
        return Ok(());
    }
    state.insert_id(id)?;
    enforce_distance(state, d)?;
    reduce_to(state, budget, |_, _| {})
}

pub fn fixed_order_with(ds: &Dataset, index: &CoverageIndex, params: &AlgoParams) -> Result<Solution> {
    params.validate(ds)?;
    check_index(index, params)?;
    let seeds = seed_clusters(ds, ds.top_l(params.l)?, params.seeding, params.k);
    let state = fixed_order_phase(ds, index, params.k, params.d, &seeds)?;
    Ok(state.to_solution(params.params()))
}

/// Hybrid's shared first phase: fixed-order with the enlarged budget.
pub fn hybrid_phase_a<'a>(
    ds: &'a Dataset,
    index: &'a CoverageIndex,
    params: &AlgoParams,
) -> Result<MergeState<'a>> {
    let budget = params.hybrid_budget();
    let seeds = seed_clusters(ds, ds.top_l(params.l)?, params.seeding, budget);
    fixed_order_phase(ds, index, budget, params.d, &seeds)
}

pub fn hybrid_with(ds: &Dataset, index: &CoverageIndex, params: &AlgoParams) -> Result<Solution> {
    params.validate(ds)?;
    check_index(index, params)?;
    let mut state = hybrid_phase_a(ds, index, params)?;
    reduce_to(&mut state, params.k, |_, _| {})?;
    Ok(state.to_solution(params.params()))
}
