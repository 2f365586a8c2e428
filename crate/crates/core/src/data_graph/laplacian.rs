use nalgebra::DMatrix;

use super::SimilarityGraph;

/// Unnormalized graph Laplacian `D - W` with unit weights, and its `1/(2d)`
/// rescaling whose spectrum lies in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    pub raw: DMatrix<f64>,
    pub rescaled: DMatrix<f64>,
    pub d: usize,
}

impl Laplacian {
    pub fn size(&self) -> usize {
        self.raw.nrows()
    }

    pub fn scale(&self) -> f64 {
        1.0 / (2.0 * self.d as f64)
    }

    /// Largest number of nonzero entries in any row of `raw`.
    pub fn max_row_nonzeros(&self) -> usize {
        self.raw
            .row_iter()
            .map(|row| row.iter().filter(|&&x| x != 0.0).count())
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        self.raw.row_iter().map(|row| row.sum().abs()).fold(0.0, f64::max)
    }
}

pub fn build_laplacian(graph: &SimilarityGraph) -> Laplacian {
    let n = graph.n_nodes();
    let mut raw = DMatrix::zeros(n, n);
    for &(i, j) in graph.edges() {
        raw[(i, j)] = -1.0;
        raw[(j, i)] = -1.0;
    }
    for i in 0..n {
        raw[(i, i)] = graph.degree(i) as f64;
    }
    let d = graph.d();
    let rescaled = &raw / (2.0 * d as f64);
    Laplacian { raw, rescaled, d }
}
