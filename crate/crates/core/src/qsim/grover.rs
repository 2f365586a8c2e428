use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::Repr;
use super::{QsimError, QuantumState, C64};

/// Phase oracle marking `t`-bit phase values `x` with `x / 2^t < λ̃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOracle {
    lambda_threshold: f64,
    t: u32,
}

impl ThresholdOracle {
    pub fn new(lambda_threshold: f64, t: u32) -> Result<Self, QsimError> {
        if !(lambda_threshold > 0.0 && lambda_threshold <= 1.0) {
            return Err(QsimError::BadThreshold(lambda_threshold));
        }
        if t == 0 || t > 52 {
            return Err(QsimError::BadLayout(format!("oracle width t = {t} must lie in 1..=52")));
        }
        Ok(Self { lambda_threshold, t })
    }

    /// Threshold `λ̃ = 2^-exponent`.
    pub fn from_exponent(exponent: u32, t: u32) -> Result<Self, QsimError> {
        Self::new(2f64.powi(-(exponent as i32)), t)
    }

    pub fn lambda_threshold(&self) -> f64 {
        self.lambda_threshold
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn marks(&self, x: u64) -> bool {
        (x as f64) < self.lambda_threshold * (1u64 << self.t) as f64
    }
}

/// `f(x) = 1` iff `x / 2^t < λ̃`.
pub fn classical_f(x: u64, oracle: &ThresholdOracle) -> u8 {
    u8::from(oracle.marks(x))
}

fn check_width(state: &QuantumState, oracle: &ThresholdOracle) -> Result<(), QsimError> {
    if state.t != oracle.t {
        return Err(QsimError::Incompatible(format!(
            "oracle acts on {} bits, phase register has {}",
            oracle.t, state.t
        )));
    }
    Ok(())
}

/// Probability that the phase register holds a marked value.
pub fn marked_probability(state: &QuantumState, oracle: &ThresholdOracle) -> Result<f64, QsimError> {
    check_width(state, oracle)?;
    Ok(state
        .phase_distribution()
        .iter()
        .enumerate()
        .filter(|(x, _)| oracle.marks(*x as u64))
        .map(|(_, p)| p)
        .sum())
}

/// `O_f`: phase `-1` on every marked phase value.
pub fn apply_oracle(state: &QuantumState, oracle: &ThresholdOracle) -> Result<QuantumState, QsimError> {
    check_width(state, oracle)?;
    let mut out = state.clone();
    match &mut out.repr {
        Repr::Dense(a) => {
            let block = 1usize << (2 * state.n);
            a.par_chunks_mut(block).enumerate().for_each(|(p, chunk)| {
                if oracle.marks(p as u64) {
                    chunk.iter_mut().for_each(|z| *z = -*z);
                }
            });
        }
        Repr::Ideal { terms, .. } => {
            for x in terms.iter_mut().filter(|x| oracle.marks(x.phase)) {
                x.amplitude = -x.amplitude;
            }
        }
    }
    Ok(out)
}

fn check_pair(state: &QuantumState, psi_pe: &QuantumState) -> Result<(), QsimError> {
    if state.t != psi_pe.t || state.n != psi_pe.n {
        return Err(QsimError::Incompatible("register sizes differ".into()));
    }
    match (&state.repr, &psi_pe.repr) {
        (Repr::Dense(_), Repr::Dense(_)) => Ok(()),
        (Repr::Ideal { terms: a, basis: ba }, Repr::Ideal { terms: b, basis: bb }) => {
            let same_basis = match (ba, bb) {
                (None, None) => true,
                (Some(x), Some(y)) => Arc::ptr_eq(x, y) || x == y,
                _ => false,
            };
            let same_keys = a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| x.phase == y.phase && x.eigen_index == y.eigen_index);
            if same_basis && same_keys {
                Ok(())
            } else {
                Err(QsimError::Incompatible("ideal states use different terms".into()))
            }
        }
        _ => Err(QsimError::Incompatible("backends differ".into())),
    }
}

/// `G = (2|ψ_pe⟩⟨ψ_pe| - I) O_f`.
pub fn grover_iteration(
    state: &QuantumState,
    oracle: &ThresholdOracle,
    psi_pe: &QuantumState,
) -> Result<QuantumState, QsimError> {
    check_pair(state, psi_pe)?;
    let mut out = apply_oracle(state, oracle)?;
    match (&mut out.repr, &psi_pe.repr) {
        (Repr::Dense(a), Repr::Dense(b)) => {
            let overlap: C64 = b.par_iter().zip(a.par_iter()).map(|(x, y)| x.conj() * y).sum();
            a.par_iter_mut().zip(b.par_iter()).for_each(|(y, x)| *y = x * (overlap * 2.0) - *y);
        }
        (Repr::Ideal { terms: a, .. }, Repr::Ideal { terms: b, .. }) => {
            let overlap: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.amplitude.conj() * y.amplitude).sum();
            for (y, x) in a.iter_mut().zip(b) {
                y.amplitude = x.amplitude * (overlap * 2.0) - y.amplitude;
            }
        }
        _ => unreachable!("checked by check_pair"),
    }
    Ok(out)
}

/// `G^r |ψ_pe⟩`.
pub fn grover_run(
    psi_pe: &QuantumState,
    oracle: &ThresholdOracle,
    r: u64,
) -> Result<QuantumState, QsimError> {
    check_width(psi_pe, oracle)?;
    let mut state = psi_pe.clone();
    for _ in 0..r {
        state = grover_iteration(&state, oracle, psi_pe)?;
    }
    Ok(state)
}

/// `r = ceil((π/4) √(N/k))`.
pub fn grover_iteration_count(k: usize, n_points: usize) -> Result<u64, QsimError> {
    if k == 0 || k > n_points {
        return Err(QsimError::BadCount { k, n: n_points });
    }
    Ok((PI / 4.0 * (n_points as f64 / k as f64).sqrt()).ceil() as u64)
}

/// Rotation angle `θ = 2 arcsin √(k/N)` of one Grover iteration.
pub fn grover_angle(k: usize, n_points: usize) -> Result<f64, QsimError> {
    if k == 0 || k >= n_points {
        return Err(QsimError::BadCount { k, n: n_points });
    }
    Ok(2.0 * (k as f64 / n_points as f64).sqrt().asin())
}
