use serde::{Deserialize, Serialize};

use super::cluster::Cluster;
use super::dataset::Dataset;
use crate::error::{Error, Result};

/// Size, coverage, and distance constraints of one summarization request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "D")]
    pub d: usize,
}

impl Params {
    pub fn new(k: usize, l: usize, d: usize) -> Self {
        Params { k, l, d }
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Parameter("k must be at least 1".into()));
        }
        if self.l == 0 || self.l > ds.n() {
            return Err(Error::Parameter(format!("L must be in [1, {}], got {}", ds.n(), self.l)));
        }
        if self.d > ds.m() {
            return Err(Error::Parameter(format!("D must be in [0, {}], got {}", ds.m(), self.d)));
        }
        Ok(())
    }
}

/// Rows covered by `c`, ascending.
pub fn coverage(c: &Cluster, ds: &Dataset) -> Vec<usize> {
    (0..ds.n()).filter(|&r| c.covers_codes(&ds.row(r).codes)).collect()
}

pub fn avg_value(rows: &[usize], ds: &Dataset) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::EmptyCoverage);
    }
    Ok(rows.iter().map(|&r| ds.value(r)).sum::<f64>() / rows.len() as f64)
}

/// Sorted union of the coverage of every cluster.
pub fn covered_union(clusters: &[Cluster], ds: &Dataset) -> Vec<usize> {
    (0..ds.n())
        .filter(|&r| clusters.iter().any(|c| c.covers_codes(&ds.row(r).codes)))
        .collect()
}

/// A set of clusters answering one `(k, L, D)` request.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Clusters in creation order.
    pub clusters: Vec<Cluster>,
    pub params: Params,
    pub covered: Vec<usize>,
    pub objective: f64,
    /// Set when distance enforcement collapsed everything into `(*, ..., *)`.
    pub collapsed_to_trivial: bool,
}

impl Solution {
    /// Build a solution by scanning coverage directly.
    pub fn from_clusters(ds: &Dataset, clusters: Vec<Cluster>, params: Params) -> Result<Solution> {
        let covered = covered_union(&clusters, ds);
        let objective = avg_value(&covered, ds)?;
        Ok(Solution { clusters, params, covered, objective, collapsed_to_trivial: false })
    }

    /// The all-star solution, feasible for every parameter choice.
    pub fn trivial(ds: &Dataset, params: Params) -> Solution {
        let covered: Vec<usize> = (0..ds.n()).collect();
        let objective = avg_value(&covered, ds).expect("datasets are never empty");
        Solution {
            clusters: vec![Cluster::all_star(ds.m())],
            params,
            covered,
            objective,
            collapsed_to_trivial: false,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.clusters.len() == 1 && self.clusters[0].is_all_star()
    }
}

/// Outcome of checking the four feasibility constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub size_ok: bool,
    pub coverage_ok: bool,
    pub distance_ok: bool,
    pub antichain_ok: bool,
    /// Top-L rows not covered by any cluster.
    pub uncovered: Vec<usize>,
    /// Cluster index pairs closer than `D`.
    pub distance_violations: Vec<(usize, usize)>,
    /// `(i, j)` where cluster `i` covers cluster `j`.
    pub antichain_violations: Vec<(usize, usize)>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.size_ok && self.coverage_ok && self.distance_ok && self.antichain_ok
    }
}

pub fn check_feasible(sol: &Solution, ds: &Dataset) -> FeasibilityReport {
    let Params { k, l, d } = sol.params;
    let cs = &sol.clusters;
    let uncovered: Vec<usize> = ds.rank()[..l.min(ds.n())]
        .iter()
        .copied()
        .filter(|&r| !cs.iter().any(|c| c.covers_codes(&ds.row(r).codes)))
        .collect();
    let mut distance_violations = Vec::new();
    let mut antichain_violations = Vec::new();
    for i in 0..cs.len() {
        for j in 0..cs.len() {
            if i == j {
                continue;
            }
            if i < j && cs[i].distance_unchecked(&cs[j]) < d {
                distance_violations.push((i, j));
            }
            if cs[i].covers_unchecked(&cs[j]) {
                antichain_violations.push((i, j));
            }
        }
    }
    FeasibilityReport {
        size_ok: cs.len() <= k,
        coverage_ok: uncovered.is_empty(),
        distance_ok: distance_violations.is_empty(),
        antichain_ok: antichain_violations.is_empty(),
        uncovered,
        distance_violations,
        antichain_violations,
    }
}
