use serde::{Deserialize, Serialize};

use super::QsimError;

pub const DEFAULT_EPSILON0: f64 = 0.1;
pub const DEFAULT_QUBIT_CAP: u32 = 26;
pub const QUBIT_CAP_ENV: &str = "QSPECTRAL_QUBIT_CAP";

/// Widest phase register whose integer values stay exact in an `f64`.
const MAX_PHASE_BITS: u32 = 52;

/// Register sizes for one circuit: `t` phase qubits, `n` eigenstate qubits,
/// `n` ancilla qubits and `t_prime` counting qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub t: u32,
    pub n: u32,
    pub t_prime: u32,
    /// Target failure probability of phase estimation, used for the default `t`.
    pub epsilon0: f64,
    /// Largest register the dense backend may allocate, in qubits.
    pub qubit_cap: u32,
}

impl RegisterLayout {
    /// Default layout for `N = 2^n` points.
    pub fn for_qubits(n: u32) -> Result<Self, QsimError> {
        Self::with_epsilon0(n, DEFAULT_EPSILON0)
    }

    pub fn with_epsilon0(n: u32, epsilon0: f64) -> Result<Self, QsimError> {
        if !(epsilon0 > 0.0 && epsilon0 < 1.0) {
            return Err(QsimError::BadLayout(format!("epsilon0 = {epsilon0} must lie in (0, 1)")));
        }
        let layout = Self {
            t: Self::default_t(n, epsilon0),
            n,
            t_prime: Self::default_t_prime(n),
            epsilon0,
            qubit_cap: DEFAULT_QUBIT_CAP,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn with_t(mut self, t: u32) -> Result<Self, QsimError> {
        self.t = t;
        self.validate()?;
        Ok(self)
    }

    pub fn with_t_prime(mut self, t_prime: u32) -> Result<Self, QsimError> {
        self.t_prime = t_prime;
        self.validate()?;
        Ok(self)
    }

    pub fn with_qubit_cap(mut self, cap: u32) -> Self {
        self.qubit_cap = cap;
        self
    }

    /// `t = n + ceil(2 + log2(1 / (2 epsilon0)))`.
    pub fn default_t(n: u32, epsilon0: f64) -> u32 {
        let extra = (2.0 + (1.0 / (2.0 * epsilon0)).log2()).ceil().max(1.0);
        n + extra as u32
    }

    /// Smallest `t'` with `2π√(k_max N)/2^t' + π² N / 4^t' < 1/2` for `k_max = N/4`.
    pub fn default_t_prime(n: u32) -> u32 {
        let big_n = 2f64.powi(n as i32);
        let k_max = big_n / 4.0;
        let pi = std::f64::consts::PI;
        (1..=MAX_PHASE_BITS)
            .find(|&tp| {
                let scale = 2f64.powi(tp as i32);
                2.0 * pi * (k_max * big_n).sqrt() / scale + pi * pi * big_n / (scale * scale) < 0.5
            })
            .unwrap_or(MAX_PHASE_BITS)
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        let bad = |msg: String| Err(QsimError::BadLayout(msg));
        if self.n == 0 || self.n > 30 {
            return bad(format!("n = {} must lie in 1..=30", self.n));
        }
        if self.t == 0 || self.t > MAX_PHASE_BITS {
            return bad(format!("t = {} must lie in 1..={MAX_PHASE_BITS}", self.t));
        }
        if self.t_prime == 0 || self.t_prime > MAX_PHASE_BITS {
            return bad(format!("t' = {} must lie in 1..={MAX_PHASE_BITS}", self.t_prime));
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        1 << self.n
    }

    /// Qubits in the phase, eigenstate and ancilla registers together.
    pub fn circuit_qubits(&self) -> u32 {
        self.t + 2 * self.n
    }

    /// Qubits needed to simulate counting densely.
    pub fn counting_qubits(&self) -> u32 {
        self.t_prime + self.circuit_qubits()
    }

    pub(crate) fn check_cap(&self, required: u32) -> Result<(), QsimError> {
        if required > self.qubit_cap {
            return Err(QsimError::QubitCap { required, cap: self.qubit_cap });
        }
        Ok(())
    }
}

/// Reads the dense-backend cap from the environment, falling back to the default.
pub fn qubit_cap_from_env() -> Result<u32, QsimError> {
    match std::env::var(QUBIT_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            QsimError::BadLayout(format!("{QUBIT_CAP_ENV} = '{v}' is not a qubit count"))
        }),
        Err(_) => Ok(DEFAULT_QUBIT_CAP),
    }
}
