//! Classical oracles and baselines: dense eigendecomposition, inverse power
//! iteration, Lloyd's k-means and classical spectral clustering.

mod eigen;
mod inverse_power;
mod kmeans;
mod partition;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::data_graph::Laplacian;

pub use eigen::{eigen_decompose, max_asymmetry, Spectrum, SYMMETRY_TOLERANCE};
pub use inverse_power::{smallest_k_eigenpairs, MAX_ITERATIONS, RESIDUAL_TOLERANCE};
pub use kmeans::{kmeans, kmeans_fit, within_cluster_ssq, KMeansFit, MAX_LLOYD_ITERATIONS};
pub use partition::Partition;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("k = {k} is invalid for {n} rows")]
    BadK { k: usize, n: usize },

    #[error("inverse iteration for eigenpair {index} did not converge (residual {residual:e})")]
    NoConvergence { index: usize, residual: f64 },

    #[error("shifted matrix is singular")]
    Singular,

    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },

    #[error("label {label} at index {index} is outside 0..{k}")]
    LabelOutOfRange { index: usize, label: usize, k: usize },
}

/// Spectral embedding `A = [u_0 … u_{k-1}]` followed by k-means on its rows.
pub fn classical_spectral_cluster(
    laplacian: &Laplacian,
    k: usize,
    seed: u64,
) -> Result<Partition, ClassicalError> {
    let spectrum = eigen_decompose(&laplacian.raw)?;
    spectral_cluster_with(&spectrum, k, seed)
}

/// As [`classical_spectral_cluster`], reusing an existing decomposition.
pub fn spectral_cluster_with(
    spectrum: &Spectrum,
    k: usize,
    seed: u64,
) -> Result<Partition, ClassicalError> {
    let n = spectrum.len();
    if k == 0 || k > n {
        return Err(ClassicalError::BadK { k, n });
    }
    let embedding: DMatrix<f64> = spectrum.leading_vectors(k);
    kmeans(&embedding, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_graph::{build_laplacian, connected_components, SimilarityGraph};

    #[test]
    fn two_disconnected_pairs() {
        let g = SimilarityGraph::from_edges(4, 2, [(0, 2), (1, 3)]).unwrap();
        let l = build_laplacian(&g);
        for seed in 0..10 {
            let p = classical_spectral_cluster(&l, 2, seed).unwrap();
            assert!(p.same_clusters(&Partition::from_labels(&[0, 1, 0, 1])));
        }
    }

    #[test]
    fn random_two_component_graph_matches_components() {
        // two random connected pieces on shuffled node ids
        let order = [9, 3, 14, 0, 7, 12, 5, 1, 15, 10, 2, 6, 13, 4, 11, 8];
        let mut edges = vec![];
        for piece in order.chunks(8) {
            for w in piece.windows(2) {
                edges.push((w[0], w[1]));
            }
            edges.push((piece[0], piece[3]));
            edges.push((piece[2], piece[6]));
        }
        let g = SimilarityGraph::from_edges(16, 4, edges).unwrap();
        let (count, labels) = connected_components(&g);
        assert_eq!(count, 2);
        let l = build_laplacian(&g);
        for seed in 0..5 {
            let p = classical_spectral_cluster(&l, 2, seed).unwrap();
            assert!(p.same_clusters(&Partition::from_labels(&labels)));
        }
    }
}
