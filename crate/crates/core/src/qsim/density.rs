use nalgebra::{DMatrix, SymmetricEigen};

use super::state::Repr;
use super::{QsimError, QuantumState, C64};

/// Tolerance on Hermiticity and unit trace.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Reduced state of the eigenstate register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(rho: DMatrix<C64>) -> Result<Self, QsimError> {
        if !rho.is_square() {
            return Err(QsimError::DimensionMismatch { expected: rho.nrows(), found: rho.ncols() });
        }
        let m = Self { rho };
        let herm = m.hermiticity_error();
        if herm > DENSITY_TOLERANCE {
            return Err(QsimError::BadState(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOLERANCE {
            return Err(QsimError::BadState(format!("density matrix trace {tr} is not 1")));
        }
        Ok(m)
    }

    pub fn from_real(rho: &DMatrix<f64>) -> Result<Self, QsimError> {
        Self::new(rho.map(|x| C64::new(x, 0.0)))
    }

    /// `I / N`.
    pub fn maximally_mixed(n_points: usize) -> Self {
        let mut rho = DMatrix::zeros(n_points, n_points);
        rho.fill_diagonal(C64::new(1.0 / n_points as f64, 0.0));
        Self { rho }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.rho.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tol).count()
    }

    /// `½ ‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64, QsimError> {
        if self.dim() != other.dim() {
            return Err(QsimError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let diff = &self.rho - &other.rho;
        let diff = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
        Ok(0.5 * SymmetricEigen::new(diff).eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// Partial trace over the phase and ancilla registers.
pub fn reduced_density(state: &QuantumState) -> Result<DensityMatrix, QsimError> {
    let big_n = state.n_points();
    let rho = match &state.repr {
        Repr::Dense(a) => {
            // columns of m run over (phase, ancilla); rows over eigen index
            let blocks = 1usize << state.t;
            let m = DMatrix::from_fn(big_n, blocks * big_n, |e, col| {
                let (p, anc) = (col / big_n, col % big_n);
                a[(p * big_n + e) * big_n + anc]
            });
            &m * m.adjoint()
        }
        Repr::Ideal { terms, basis } => {
            let mut weights = vec![0.0; big_n];
            for x in terms {
                weights[x.eigen_index] += x.amplitude.norm_sqr();
            }
            let real = match basis {
                None => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(weights)),
                Some(b) => {
                    let mut scaled = b.vectors.clone();
                    for (j, w) in weights.iter().enumerate() {
                        scaled.column_mut(j).scale_mut(*w);
                    }
                    &scaled * b.vectors.transpose()
                }
            };
            real.map(|x| C64::new(x, 0.0))
        }
    };
    DensityMatrix::new(rho)
}
