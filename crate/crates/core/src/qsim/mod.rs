//! Circuit simulation: entangled-state preparation, phase estimation with
//! `U = e^{2πiL}`, the threshold oracle, Grover iterations, partial traces
//! and quantum counting.
//!
//! Dense states index amplitudes as `(phase << 2n) | (eigen << n) | ancilla`.
//! Phase-register qubit `j` controls `U^{2^j}`, so the phase register reads
//! as a plain integer.

mod counting;
mod density;
mod grover;
mod layout;
mod qpe;
mod state;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::ClassicalError;

pub use counting::{
    counting_distribution, decode_count, quantum_counting, CountEstimate, CountingOptions,
    DEFAULT_COUNTING_SHOTS,
};
pub use density::{reduced_density, DensityMatrix, DENSITY_TOLERANCE};
pub use grover::{
    apply_oracle, classical_f, grover_angle, grover_iteration, grover_iteration_count, grover_run,
    marked_probability, ThresholdOracle,
};
pub use layout::{
    qubit_cap_from_env, RegisterLayout, DEFAULT_EPSILON0, DEFAULT_QUBIT_CAP, QUBIT_CAP_ENV,
};
pub use qpe::{apply_qpe, apply_qpe_with, rounded_phase, EIGENVALUE_TOLERANCE};
pub use state::{
    dense_index, prepare_entangled_state, read_dense_dump, IdealTerm, QuantumState,
    NORM_TOLERANCE,
};

/// Complex amplitude type shared by all backends.
pub type C64 = nalgebra::Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Full amplitude vector over all registers.
    Dense,
    /// Eigenbasis terms with exactly rounded phases.
    Ideal,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dense => "dense",
            Self::Ideal => "ideal",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = QsimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Self::Dense),
            "ideal" => Ok(Self::Ideal),
            other => Err(QsimError::BadLayout(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum QsimError {
    #[error("dense backend needs {required} qubits, above the cap of {cap}")]
    QubitCap { required: u32, cap: u32 },

    #[error("invalid register layout: {0}")]
    BadLayout(String),

    #[error("eigenvalue {value} at index {index} lies outside [0, 1); the Laplacian is not rescaled")]
    EigenvalueOutOfRange { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("states are incompatible: {0}")]
    Incompatible(String),

    #[error("phase estimation expects the maximally entangled input state")]
    NotEntangledInput,

    #[error("count k = {k} is invalid for N = {n}")]
    BadCount { k: usize, n: usize },

    #[error("threshold {0} is outside (0, 1]")]
    BadThreshold(f64),

    #[error("invalid state: {0}")]
    BadState(String),

    #[error(
        "counting outcome {phase} of {t_prime} bits is ambiguous (angle in [π/2, 3π/2]); increase t'"
    )]
    Ambiguous { phase: u64, t_prime: u32 },

    #[error(transparent)]
    Classical(#[from] ClassicalError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
