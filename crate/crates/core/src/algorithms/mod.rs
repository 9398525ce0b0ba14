//! Greedy merge heuristics: bottom-up, fixed-order (optionally seeded), and
//! hybrid, all sharing one incremental objective evaluator.

mod heuristics;
mod seeding;
mod state;

pub use heuristics::{
    bottom_up, bottom_up_with, enforce_distance, fixed_order, fixed_order_phase, fixed_order_with,
    hybrid, hybrid_budget, hybrid_phase_a, hybrid_with, reduce_to, summarize, summarize_with,
    AlgoParams, Algorithm, DEFAULT_HYBRID_C,
};
pub use seeding::{seed_clusters, Seeding, KMODES_MAX_ITERS};
pub use state::{LiveCluster, MergeState, Mutation};
