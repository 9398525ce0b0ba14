//! Elements, clusters, the cluster distance, coverage, and feasibility.

mod candidates;
mod cluster;
mod dataset;
mod solution;

pub use candidates::{CandidateId, CoverageIndex, DEFAULT_MAX_M};
pub use cluster::{Cluster, Code, Slot};
pub use dataset::{Dataset, Dictionary, Element, RawRow, RawTable};
pub use solution::{avg_value, check_feasible, coverage, covered_union, FeasibilityReport, Params, Solution};
