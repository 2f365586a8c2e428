use nalgebra::{DMatrix, SymmetricEigen};

use super::ClassicalError;

/// Maximum tolerated `|A - Aᵀ|` entry for symmetric inputs.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Full eigendecomposition of a real symmetric matrix, sorted ascending.
///
/// Column `j` of `vectors` pairs with `values[j]`. Each column is normalized
/// so that its first entry of magnitude above `1e-10` is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of eigenvalues strictly below `threshold`.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.values.iter().filter(|&&v| v < threshold).count()
    }

    /// Columns `0..k` of the eigenvector matrix.
    pub fn leading_vectors(&self, k: usize) -> DMatrix<f64> {
        self.vectors.columns(0, k).into_owned()
    }

    pub fn vector(&self, j: usize) -> nalgebra::DVector<f64> {
        self.vectors.column(j).into_owned()
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn fix_sign(mut v: nalgebra::DVectorViewMut<'_, f64>) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10).copied() {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Dense symmetric eigensolver.
pub fn eigen_decompose(m: &DMatrix<f64>) -> Result<Spectrum, ClassicalError> {
    if !m.is_square() {
        return Err(ClassicalError::NotSquare(m.nrows(), m.ncols()));
    }
    let asym = max_asymmetry(m);
    if asym > SYMMETRY_TOLERANCE {
        return Err(ClassicalError::NotSymmetric(asym));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Spectrum { values: vec![], vectors: DMatrix::zeros(0, 0) });
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
        fix_sign(vectors.column_mut(dst));
    }
    Ok(Spectrum { values, vectors })
}
