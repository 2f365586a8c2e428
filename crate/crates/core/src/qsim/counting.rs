use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qpe::inverse_qft_strided;
use super::{grover_iteration, marked_probability, QsimError, QuantumState, RegisterLayout, ThresholdOracle, C64};
use crate::seeding;

/// Measurement shots drawn from the dense counting distribution.
pub const DEFAULT_COUNTING_SHOTS: usize = 25;

/// Components per parallel work item when summing the counting distribution.
const COLUMN_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingOptions {
    pub t_prime: u32,
    /// Shots sampled by the dense backend; the majority outcome is reported.
    pub shots: usize,
    pub seed: u64,
    pub qubit_cap: u32,
}

impl CountingOptions {
    pub fn from_layout(layout: &RegisterLayout, seed: u64) -> Self {
        Self { t_prime: layout.t_prime, shots: DEFAULT_COUNTING_SHOTS, seed, qubit_cap: layout.qubit_cap }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountEstimate {
    pub k: usize,
    /// Estimated Grover angle after disambiguation, in `[0, π/2)`.
    pub theta: f64,
    /// Counting-register outcome the estimate was decoded from.
    pub phase: u64,
}

/// Decodes a `t'`-bit counting outcome into `k = round(N sin²(θ̂/2))`.
///
/// Outcomes above `3π/2` are read as `2π - θ̂`; outcomes in `[π/2, 3π/2]`
/// cannot be told apart from their mirror image.
pub fn decode_count(phase: u64, t_prime: u32, n_points: usize) -> Result<CountEstimate, QsimError> {
    let raw = TAU * phase as f64 / (1u64 << t_prime) as f64;
    let theta = if raw > 1.5 * PI { TAU - raw } else { raw };
    if theta >= FRAC_PI_2 {
        return Err(QsimError::Ambiguous { phase, t_prime });
    }
    let k = (n_points as f64 * (theta / 2.0).sin().powi(2)).round() as usize;
    Ok(CountEstimate { k, theta, phase })
}

/// Estimates the number of marked eigenvalues by phase estimation of `G`.
///
/// The ideal backend rounds the exact angle `2 arcsin √p` to `t'` bits. The
/// dense backend simulates the counting register, samples `shots` outcomes
/// and reports the most frequent decoded count.
pub fn quantum_counting(
    psi_pe: &QuantumState,
    oracle: &ThresholdOracle,
    opts: &CountingOptions,
) -> Result<CountEstimate, QsimError> {
    if opts.t_prime == 0 || opts.t_prime > 52 {
        return Err(QsimError::BadLayout(format!("t' = {} must lie in 1..=52", opts.t_prime)));
    }
    let big_n = psi_pe.n_points();
    match psi_pe.backend() {
        super::Backend::Ideal => {
            let p = marked_probability(psi_pe, oracle)?.clamp(0.0, 1.0);
            let theta = 2.0 * p.sqrt().asin();
            let len = 1u64 << opts.t_prime;
            let phase = ((theta / TAU * len as f64).round() as u64) % len;
            decode_count(phase, opts.t_prime, big_n)
        }
        super::Backend::Dense => {
            if opts.shots == 0 {
                return Err(QsimError::BadLayout("counting needs at least one shot".into()));
            }
            let dist = counting_distribution(psi_pe, oracle, opts.t_prime, opts.qubit_cap)?;
            majority(&dist, opts, big_n)
        }
    }
}

fn majority(dist: &[f64], opts: &CountingOptions, big_n: usize) -> Result<CountEstimate, QsimError> {
    let sampler = WeightedIndex::new(dist)
        .map_err(|e| QsimError::BadState(format!("counting distribution: {e}")))?;
    let mut rng = seeding::rng(opts.seed);
    let mut hits: BTreeMap<u64, usize> = BTreeMap::new();
    for _ in 0..opts.shots {
        *hits.entry(sampler.sample(&mut rng) as u64).or_default() += 1;
    }
    // tally by decoded count; `None` collects ambiguous outcomes
    let mut tally: BTreeMap<Option<usize>, (usize, u64, usize)> = BTreeMap::new();
    for (&y, &c) in &hits {
        let key = decode_count(y, opts.t_prime, big_n).ok().map(|e| e.k);
        let entry = tally.entry(key).or_insert((0, y, 0));
        entry.0 += c;
        if c > entry.2 {
            entry.1 = y;
            entry.2 = c;
        }
    }
    let (key, &(_, y, _)) = tally
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then_with(|| b.0.cmp(a.0)))
        .expect("at least one shot");
    match key {
        Some(_) => decode_count(y, opts.t_prime, big_n),
        None => Err(QsimError::Ambiguous { phase: y, t_prime: opts.t_prime }),
    }
}

/// Outcome distribution of a `t'`-qubit counting register on a dense state.
pub fn counting_distribution(
    psi_pe: &QuantumState,
    oracle: &ThresholdOracle,
    t_prime: u32,
    qubit_cap: u32,
) -> Result<Vec<f64>, QsimError> {
    let dim = psi_pe
        .amplitudes()
        .ok_or_else(|| QsimError::Incompatible("dense counting needs a dense state".into()))?
        .len();
    let required = t_prime + psi_pe.t + 2 * psi_pe.n;
    if required > qubit_cap {
        return Err(QsimError::QubitCap { required, cap: qubit_cap });
    }
    let len = 1usize << t_prime;
    // row m holds G^m |ψ_pe⟩ / √T'
    let scale = 1.0 / (len as f64).sqrt();
    let mut joint: Vec<C64> = Vec::with_capacity(len * dim);
    let mut current = psi_pe.clone();
    for m in 0..len {
        if m > 0 {
            current = grover_iteration(&current, oracle, psi_pe)?;
        }
        joint.extend(current.amplitudes().expect("dense").iter().map(|z| z * scale));
    }
    inverse_qft_strided(&mut joint, len, dim);
    let rows: &[C64] = &joint;
    let partial: Vec<Vec<f64>> = (0..dim.div_ceil(COLUMN_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let cols = chunk * COLUMN_CHUNK..((chunk + 1) * COLUMN_CHUNK).min(dim);
            (0..len)
                .map(|y| rows[y * dim + cols.start..y * dim + cols.end].iter().map(|z| z.norm_sqr()).sum())
                .collect()
        })
        .collect();
    let mut dist = vec![0.0; len];
    for p in &partial {
        for (d, x) in dist.iter_mut().zip(p) {
            *d += x;
        }
    }
    Ok(dist)
}
