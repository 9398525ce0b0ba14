//! Summaries of the high-valued answers of an aggregate query as a few
//! diverse wildcard clusters.
//!
//! Rows of the query output are dictionary-encoded into a [`Dataset`]. A
//! [`Cluster`] is a pattern over the group-by attributes where any slot may
//! be the wildcard `*`. Given `k`, `L`, and `D`, the heuristics in
//! [`algorithms`] pick at most `k` pairwise `D`-distant, mutually
//! incomparable clusters covering the top `L` rows while keeping the
//! average value of everything they cover high.

pub mod algorithms;
pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod matchviz;
pub mod model;
pub mod oracle;
pub mod payload;
pub mod store;

pub use algorithms::{AlgoParams, Algorithm, MergeState, Seeding};
pub use error::{Error, Result};
pub use model::{
    avg_value, check_feasible, coverage, Cluster, CoverageIndex, Dataset, FeasibilityReport, Params, Slot,
    Solution,
};
