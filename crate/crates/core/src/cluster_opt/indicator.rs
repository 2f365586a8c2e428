use nalgebra::DMatrix;

use super::ClusterError;
use crate::classical::Partition;

/// `N × k` matrix with `x_ij = 1/√s_j` when point `i` lies in cluster `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    x: DMatrix<f64>,
    sizes: Vec<usize>,
    labels: Vec<usize>,
}

impl IndicatorMatrix {
    /// Validates an explicit matrix: one nonzero per row, equal to `1/√s_j`.
    pub fn from_matrix(x: DMatrix<f64>) -> Result<Self, ClusterError> {
        let (n, k) = x.shape();
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let nz: Vec<usize> = (0..k).filter(|&j| x[(i, j)] != 0.0).collect();
            match nz.as_slice() {
                [j] => labels.push(*j),
                _ => {
                    return Err(ClusterError::BadIndicator(format!(
                        "row {i} has {} nonzero entries",
                        nz.len()
                    )))
                }
            }
        }
        let built = build_from_labels(labels, k)?;
        if (&built.x - &x).amax() > 1e-12 {
            return Err(ClusterError::BadIndicator("entries differ from 1/sqrt(s_j)".into()));
        }
        Ok(built)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_points(&self) -> usize {
        self.labels.len()
    }
}

fn build_from_labels(labels: Vec<usize>, k: usize) -> Result<IndicatorMatrix, ClusterError> {
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        if l >= k {
            return Err(ClusterError::BadIndicator(format!("label {l} outside 0..{k}")));
        }
        sizes[l] += 1;
    }
    if let Some(j) = sizes.iter().position(|&s| s == 0) {
        return Err(ClusterError::EmptyCluster(j));
    }
    let mut x = DMatrix::zeros(labels.len(), k);
    for (i, &l) in labels.iter().enumerate() {
        x[(i, l)] = 1.0 / (sizes[l] as f64).sqrt();
    }
    Ok(IndicatorMatrix { x, sizes, labels })
}

pub fn build_indicator(partition: &Partition) -> Result<IndicatorMatrix, ClusterError> {
    build_from_labels(partition.labels().to_vec(), partition.k())
}

/// `P_j = { i : X_ij ≠ 0 }`.
pub fn extract_partition(x: &IndicatorMatrix) -> Result<Partition, ClusterError> {
    Ok(Partition::new(x.labels.clone(), x.k())?)
}
