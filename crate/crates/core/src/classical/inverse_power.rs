use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::eigen::{fix_sign, max_asymmetry, Spectrum, SYMMETRY_TOLERANCE};
use super::ClassicalError;
use crate::seeding;

pub const MAX_ITERATIONS: usize = 10_000;
pub const RESIDUAL_TOLERANCE: f64 = 1e-7;
pub const SHIFT_OFFSET: f64 = 1e-6;

fn deflate(v: &mut DVector<f64>, found: &[DVector<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for u in found {
            let c = u.dot(v);
            v.axpy(-c, u, 1.0);
        }
    }
}

/// The `k` smallest eigenpairs of a positive semidefinite matrix by shifted
/// inverse iteration with Gram-Schmidt deflation.
///
/// Pair `j` is found with the shift `λ_{j-1} - 1e-6` (`-1e-6` for `j = 0`),
/// which sits just below every eigenvalue still in the deflated subspace.
pub fn smallest_k_eigenpairs(m: &DMatrix<f64>, k: usize) -> Result<Spectrum, ClassicalError> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(ClassicalError::NotSquare(m.nrows(), m.ncols()));
    }
    if k == 0 || k >= n {
        return Err(ClassicalError::BadK { k, n });
    }
    let asym = max_asymmetry(m);
    if asym > SYMMETRY_TOLERANCE {
        return Err(ClassicalError::NotSymmetric(asym));
    }
    let mut rng = seeding::rng(0x1A5E_ED00);
    let mut values = Vec::with_capacity(k);
    let mut found: Vec<DVector<f64>> = Vec::with_capacity(k);
    for index in 0..k {
        let mut shift = values.last().copied().unwrap_or(0.0) - SHIFT_OFFSET;
        let lu = loop {
            let shifted = m - DMatrix::identity(n, n) * shift;
            let lu = shifted.lu();
            if lu.is_invertible() {
                break lu;
            }
            shift -= SHIFT_OFFSET;
        };
        let mut x = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        deflate(&mut x, &found);
        x.normalize_mut();
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let mut y = lu.solve(&x).ok_or(ClassicalError::Singular)?;
            deflate(&mut y, &found);
            let norm = y.norm();
            if norm == 0.0 || !norm.is_finite() {
                return Err(ClassicalError::Singular);
            }
            x = y / norm;
            let mx = m * &x;
            let lambda = x.dot(&mx);
            residual = (mx - &x * lambda).norm();
            if residual <= RESIDUAL_TOLERANCE {
                values.push(lambda);
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(ClassicalError::NoConvergence { index, residual });
        }
        found.push(x);
    }
    let mut vectors = DMatrix::zeros(n, k);
    for (j, v) in found.iter().enumerate() {
        vectors.set_column(j, v);
        fix_sign(vectors.column_mut(j));
    }
    Ok(Spectrum { values, vectors })
}
