use rand_distr::{Binomial, Distribution};

use super::{ClusterError, IndicatorMatrix};
use crate::qsim::DensityMatrix;
use crate::seeding;

fn check_dims(rho: &DensityMatrix, x: &IndicatorMatrix) -> Result<(), ClusterError> {
    if rho.dim() != x.n_points() {
        return Err(ClusterError::DimensionMismatch { expected: rho.dim(), found: x.n_points() });
    }
    Ok(())
}

/// `Tr(ρ XXᵀ) = Σ_j (1/s_j) Σ_{a,b ∈ C_j} Re ρ_ab`.
pub fn objective(rho: &DensityMatrix, x: &IndicatorMatrix) -> Result<f64, ClusterError> {
    check_dims(rho, x)?;
    let m = rho.matrix();
    let mut members = vec![Vec::new(); x.k()];
    for (i, &l) in x.labels().iter().enumerate() {
        members[l].push(i);
    }
    Ok(members
        .iter()
        .map(|c| {
            let s: f64 = c.iter().flat_map(|&a| c.iter().map(move |&b| m[(a, b)].re)).sum();
            s / c.len() as f64
        })
        .sum())
}

/// Mean of `n_M` projective measurements of `M = XXᵀ` on `ρ`.
pub fn estimate_expectation(
    rho: &DensityMatrix,
    x: &IndicatorMatrix,
    n_m: u64,
    seed: u64,
) -> Result<f64, ClusterError> {
    if n_m == 0 {
        return Err(ClusterError::BadConfig("n_M must be at least 1".into()));
    }
    let p = objective(rho, x)?;
    let mut rng = seeding::rng(seed);
    Ok(sample_mean(p, n_m, &mut rng))
}

pub(crate) fn sample_mean<R: rand::Rng>(p: f64, n_m: u64, rng: &mut R) -> f64 {
    let dist = Binomial::new(n_m, p.clamp(0.0, 1.0)).expect("p clamped to [0, 1]");
    dist.sample(rng) as f64 / n_m as f64
}
