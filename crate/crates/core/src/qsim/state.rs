use std::collections::HashSet;
use std::io::{Read, Write};
use std::sync::Arc;

use super::{Backend, QsimError, RegisterLayout, C64};
use crate::classical::Spectrum;

pub const NORM_TOLERANCE: f64 = 1e-10;

/// One component `amplitude · |phase⟩|u_i⟩|u_i*⟩` of an ideal-backend state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealTerm {
    pub phase: u64,
    pub eigen_index: usize,
    pub amplitude: C64,
}

#[derive(Debug, Clone)]
pub(crate) enum Repr {
    Dense(Vec<C64>),
    /// `basis = None` means the computational basis, `u_i = e_i`.
    Ideal { terms: Vec<IdealTerm>, basis: Option<Arc<Spectrum>> },
}

/// State of the phase, eigenstate and ancilla registers.
#[derive(Debug, Clone)]
pub struct QuantumState {
    pub(crate) t: u32,
    pub(crate) n: u32,
    pub(crate) repr: Repr,
}

/// Position of `|p⟩|e⟩|a⟩` in a dense amplitude vector.
pub fn dense_index(phase: usize, eigen: usize, ancilla: usize, n: u32) -> usize {
    (phase << (2 * n)) | (eigen << n) | ancilla
}

fn check_norm(norm_sqr: f64) -> Result<(), QsimError> {
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(QsimError::BadState(format!("squared norm {norm_sqr} is not 1")));
    }
    Ok(())
}

impl QuantumState {
    pub fn dense(t: u32, n: u32, amplitudes: Vec<C64>) -> Result<Self, QsimError> {
        let expected = 1usize << (t + 2 * n);
        if amplitudes.len() != expected {
            return Err(QsimError::DimensionMismatch { expected, found: amplitudes.len() });
        }
        let s = Self { t, n, repr: Repr::Dense(amplitudes) };
        check_norm(s.norm_sqr())?;
        Ok(s)
    }

    pub fn ideal(
        t: u32,
        n: u32,
        terms: Vec<IdealTerm>,
        basis: Option<Arc<Spectrum>>,
    ) -> Result<Self, QsimError> {
        let big_n = 1usize << n;
        if let Some(b) = &basis {
            if b.len() != big_n || b.vectors.ncols() != big_n {
                return Err(QsimError::DimensionMismatch { expected: big_n, found: b.len() });
            }
        }
        let mut keys = HashSet::with_capacity(terms.len());
        for term in &terms {
            if term.phase >= 1u64 << t || term.eigen_index >= big_n {
                return Err(QsimError::BadState(format!(
                    "term ({}, {}) outside the registers",
                    term.phase, term.eigen_index
                )));
            }
            if !keys.insert((term.phase, term.eigen_index)) {
                return Err(QsimError::BadState(format!(
                    "duplicate term ({}, {})",
                    term.phase, term.eigen_index
                )));
            }
        }
        let s = Self { t, n, repr: Repr::Ideal { terms, basis } };
        check_norm(s.norm_sqr())?;
        Ok(s)
    }

    pub fn backend(&self) -> Backend {
        match self.repr {
            Repr::Dense(_) => Backend::Dense,
            Repr::Ideal { .. } => Backend::Ideal,
        }
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_points(&self) -> usize {
        1 << self.n
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Dense(a) => Some(a),
            Repr::Ideal { .. } => None,
        }
    }

    pub fn terms(&self) -> Option<&[IdealTerm]> {
        match &self.repr {
            Repr::Ideal { terms, .. } => Some(terms),
            Repr::Dense(_) => None,
        }
    }

    /// Eigenbasis of an ideal state; `None` for the computational basis or a dense state.
    pub fn basis(&self) -> Option<&Arc<Spectrum>> {
        match &self.repr {
            Repr::Ideal { basis, .. } => basis.as_ref(),
            Repr::Dense(_) => None,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.repr {
            Repr::Dense(a) => a.iter().map(|z| z.norm_sqr()).sum(),
            Repr::Ideal { terms, .. } => terms.iter().map(|x| x.amplitude.norm_sqr()).sum(),
        }
    }

    /// Marginal distribution of the phase register.
    pub fn phase_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.t];
        match &self.repr {
            Repr::Dense(a) => {
                let block = 1usize << (2 * self.n);
                for (p, chunk) in a.chunks(block).enumerate() {
                    out[p] = chunk.iter().map(|z| z.norm_sqr()).sum();
                }
            }
            Repr::Ideal { terms, .. } => {
                for term in terms {
                    out[term.phase as usize] += term.amplitude.norm_sqr();
                }
            }
        }
        out
    }

    /// Ideal states write `phase_int,eigen_index,re,im` lines. Dense states
    /// write a little-endian header of two `u32` values `(t, n)` followed by
    /// `(re, im)` pairs of `f64`.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        match &self.repr {
            Repr::Ideal { terms, .. } => {
                for x in terms {
                    writeln!(
                        out,
                        "{},{},{:e},{:e}",
                        x.phase, x.eigen_index, x.amplitude.re, x.amplitude.im
                    )?;
                }
            }
            Repr::Dense(a) => {
                out.write_all(&self.t.to_le_bytes())?;
                out.write_all(&self.n.to_le_bytes())?;
                let mut buf = Vec::with_capacity(a.len() * 16);
                for z in a {
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
                out.write_all(&buf)?;
            }
        }
        Ok(())
    }
}

/// Reads a dense dump written by [`QuantumState::write_dump`].
pub fn read_dense_dump<R: Read>(mut input: R) -> Result<QuantumState, QsimError> {
    let mut header = [0u8; 8];
    input.read_exact(&mut header)?;
    let t = u32::from_le_bytes(header[..4].try_into().expect("4 bytes"));
    let n = u32::from_le_bytes(header[4..].try_into().expect("4 bytes"));
    if t + 2 * n > 40 {
        return Err(QsimError::BadState(format!("dump header (t = {t}, n = {n}) is implausible")));
    }
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    let expected = 16usize << (t + 2 * n);
    if body.len() != expected {
        return Err(QsimError::DimensionMismatch { expected, found: body.len() });
    }
    let amps = body
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    QuantumState::dense(t, n, amps)
}

/// `|0⟩^t ⊗ (1/√N) Σ_i |i⟩|i⟩`: Hadamards on the eigenstate register, then a
/// CNOT from each eigenstate qubit to its ancilla partner.
pub fn prepare_entangled_state(
    layout: &RegisterLayout,
    backend: Backend,
) -> Result<QuantumState, QsimError> {
    layout.validate()?;
    let (t, n) = (layout.t, layout.n);
    let big_n = layout.n_points();
    let weight = C64::new(1.0 / (big_n as f64).sqrt(), 0.0);
    match backend {
        Backend::Dense => {
            layout.check_cap(layout.circuit_qubits())?;
            let mut amps = vec![C64::new(0.0, 0.0); 1 << layout.circuit_qubits()];
            for i in 0..big_n {
                amps[dense_index(0, i, i, n)] = weight;
            }
            Ok(QuantumState { t, n, repr: Repr::Dense(amps) })
        }
        Backend::Ideal => {
            let terms = (0..big_n)
                .map(|i| IdealTerm { phase: 0, eigen_index: i, amplitude: weight })
                .collect();
            Ok(QuantumState { t, n, repr: Repr::Ideal { terms, basis: None } })
        }
    }
}
