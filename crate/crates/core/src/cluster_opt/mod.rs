//! Cluster indicator matrices, the `Tr(ρXXᵀ)` objective, hill climbing and
//! the threshold search for a target cluster count.

mod climb;
mod indicator;
mod objective;
mod search;

use thiserror::Error;

use crate::classical::ClassicalError;

pub use climb::{hill_climb, ClimbConfig, ClimbResult, ClimbStep, DEFAULT_RESTARTS, EXACT_TOLERANCE};
pub use indicator::{build_indicator, extract_partition, IndicatorMatrix};
pub use objective::{estimate_expectation, objective};
pub use search::{binary_search_threshold, probe_budget, quantum_count_probe, ThresholdSearch};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("invalid indicator matrix: {0}")]
    BadIndicator(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("k = {k} is invalid for {n} points")]
    BadK { k: usize, n: usize },

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    #[error("count at the upper bound {hi} is {count}, below the target {k0}")]
    TargetAboveRange { k0: usize, hi: f64, count: usize },

    #[error(
        "no threshold with count {k0} found: bracket [{lo}, {hi}] has counts {count_lo:?} and {count_hi} after {probes} probes"
    )]
    Unreachable {
        k0: usize,
        lo: f64,
        hi: f64,
        count_lo: Option<usize>,
        count_hi: usize,
        probes: usize,
    },

    #[error("counting failed: {0}")]
    Counting(Box<dyn std::error::Error + Send + Sync>),

    #[error(transparent)]
    Classical(#[from] ClassicalError),
}
