use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::state::Repr;
use super::{IdealTerm, QsimError, QuantumState, RegisterLayout, C64};
use crate::classical::{eigen_decompose, Spectrum};

/// Eigenvalues down to `-EIGENVALUE_TOLERANCE` are treated as zero.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// Columns transformed per batch by [`inverse_qft_strided`].
const FFT_BATCH: usize = 4096;

/// Nearest `t`-bit integer to `lambda · 2^t`, ties rounding up, modulo `2^t`.
pub fn rounded_phase(lambda: f64, t: u32) -> u64 {
    let scale = (1u64 << t) as f64;
    ((lambda * scale + 0.5).floor() as i64).rem_euclid(1i64 << t) as u64
}

/// Phase estimation of `U = e^{2πiL}` for a rescaled Laplacian `L`.
pub fn apply_qpe(
    state: &QuantumState,
    laplacian: &DMatrix<f64>,
    layout: &RegisterLayout,
) -> Result<QuantumState, QsimError> {
    let spectrum = Arc::new(eigen_decompose(laplacian)?);
    apply_qpe_with(state, &spectrum, layout)
}

/// As [`apply_qpe`], reusing the eigendecomposition of `L`.
pub fn apply_qpe_with(
    state: &QuantumState,
    spectrum: &Arc<Spectrum>,
    layout: &RegisterLayout,
) -> Result<QuantumState, QsimError> {
    layout.validate()?;
    if state.t != layout.t || state.n != layout.n {
        return Err(QsimError::Incompatible(format!(
            "state has (t, n) = ({}, {}), layout has ({}, {})",
            state.t, state.n, layout.t, layout.n
        )));
    }
    let big_n = state.n_points();
    if spectrum.len() != big_n {
        return Err(QsimError::DimensionMismatch { expected: big_n, found: spectrum.len() });
    }
    for (index, &value) in spectrum.values.iter().enumerate() {
        if !(-EIGENVALUE_TOLERANCE..1.0).contains(&value) {
            return Err(QsimError::EigenvalueOutOfRange { index, value });
        }
    }
    let repr = match &state.repr {
        Repr::Dense(amps) => Repr::Dense(dense_qpe(amps, state.t, state.n, spectrum)),
        Repr::Ideal { terms, basis } => {
            // (1/√N) Σ_i |i⟩|i⟩ equals (1/√N) Σ_j |u_j⟩|u_j⟩ in any real orthonormal basis,
            // so the pairing can be read in the eigenbasis of L, where QPE only writes phases.
            let first = terms.first().map(|x| x.amplitude).ok_or(QsimError::NotEntangledInput)?;
            let uniform = basis.is_none()
                && terms.len() == big_n
                && terms.iter().all(|x| x.phase == 0 && (x.amplitude - first).norm() < 1e-12);
            if !uniform {
                return Err(QsimError::NotEntangledInput);
            }
            let terms = spectrum
                .values
                .iter()
                .enumerate()
                .map(|(i, &lambda)| IdealTerm {
                    phase: rounded_phase(lambda.max(0.0), state.t),
                    eigen_index: i,
                    amplitude: first,
                })
                .collect();
            Repr::Ideal { terms, basis: Some(Arc::clone(spectrum)) }
        }
    };
    Ok(QuantumState { t: state.t, n: state.n, repr })
}

fn hadamard(psi: &mut [C64], qubit: u32) {
    let stride = 1usize << qubit;
    psi.par_chunks_mut(2 * stride).for_each(|chunk| {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = (x + y) * FRAC_1_SQRT_2;
            *b = (x - y) * FRAC_1_SQRT_2;
        }
    });
}

fn dense_qpe(amps: &[C64], t: u32, n: u32, spectrum: &Spectrum) -> Vec<C64> {
    let big_n = 1usize << n;
    let block = big_n * big_n;
    let mut psi = amps.to_vec();
    for q in 0..t {
        hadamard(&mut psi, 2 * n + q);
    }
    let v = spectrum.vectors.map(|x| C64::new(x, 0.0));
    let vt = v.transpose();
    // phase block p holds the eigen/ancilla amplitudes and receives U^p
    psi.par_chunks_mut(block).enumerate().for_each(|(p, chunk)| {
        if chunk.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            return;
        }
        let b = DMatrix::from_row_slice(big_n, big_n, chunk);
        let mut c = &vt * b;
        for (j, &lambda) in spectrum.values.iter().enumerate() {
            let turn = (lambda * p as f64).rem_euclid(1.0);
            let w = C64::from_polar(1.0, TAU * turn);
            for z in c.row_mut(j).iter_mut() {
                *z *= w;
            }
        }
        let out = &v * c;
        for e in 0..big_n {
            for a in 0..big_n {
                chunk[e * big_n + a] = out[(e, a)];
            }
        }
    });
    inverse_qft_strided(&mut psi, 1 << t, block);
    psi
}

/// Inverse QFT `|x⟩ → 2^{-t/2} Σ_y e^{-2πixy/2^t} |y⟩` on the most significant
/// register of `psi`, laid out as `len` rows of `stride` entries.
pub(crate) fn inverse_qft_strided(psi: &mut [C64], len: usize, stride: usize) {
    debug_assert_eq!(psi.len(), len * stride);
    let fft = FftPlanner::new().plan_fft_forward(len);
    let scale = 1.0 / (len as f64).sqrt();
    for start in (0..stride).step_by(FFT_BATCH) {
        let width = FFT_BATCH.min(stride - start);
        let data: &[C64] = psi;
        let columns: Vec<Vec<C64>> = (start..start + width)
            .into_par_iter()
            .map(|c| {
                let mut col: Vec<C64> = (0..len).map(|x| data[x * stride + c]).collect();
                fft.process(&mut col);
                col
            })
            .collect();
        for (offset, col) in columns.into_iter().enumerate() {
            for (y, z) in col.into_iter().enumerate() {
                psi[y * stride + start + offset] = z * scale;
            }
        }
    }
}
