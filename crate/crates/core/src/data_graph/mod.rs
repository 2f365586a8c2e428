//! Point clouds, mutual nearest-neighbor similarity graphs and their
//! Laplacians.

mod dataset;
mod graph;
mod laplacian;

use thiserror::Error;

pub use dataset::{
    generate_dataset, load_dataset, parse_dataset, BoundingBox, Dataset, DatasetKind,
    GeneratorParams, PAD_OFFSET,
};
pub use graph::{build_knn_graph, connected_components, nearest_neighbors, SimilarityGraph};
pub use laplacian::{build_laplacian, Laplacian};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("number of points must be a power of two (>= 2), got {0}")]
    NotPowerOfTwo(usize),

    #[error("neighborhood parameter d = {d} is invalid for {n} points (need 2 <= d <= N)")]
    BadNeighborhood { d: usize, n: usize },

    #[error("invalid edge ({0}, {1})")]
    BadEdge(usize, usize),

    #[error("node {node} has degree {degree}, above d - 1 for d = {d}")]
    DegreeTooHigh { node: usize, degree: usize, d: usize },

    #[error("unknown dataset kind '{0}'")]
    UnknownKind(String),

    #[error("bad generator parameters: {0}")]
    BadParams(String),

    #[error("non-numeric value '{value}' at row {row}, column {column}")]
    Parse { row: usize, column: usize, value: String },

    #[error("row {row} has {found} columns, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },

    #[error("dataset file contains no points")]
    Empty,

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
