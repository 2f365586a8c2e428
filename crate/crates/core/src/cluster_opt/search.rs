use serde::{Deserialize, Serialize};

use super::ClusterError;
use crate::qsim::{quantum_counting, CountingOptions, QsimError, QuantumState, ThresholdOracle};

/// Outcome of [`binary_search_threshold`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearch {
    pub lambda: f64,
    pub k0: usize,
    /// Every probe `(λ̃, count)` in order.
    pub history: Vec<(f64, usize)>,
    pub budget: usize,
}

/// `ceil(log2((hi - lo) / delta_floor))`, at least one probe.
pub fn probe_budget(lo: f64, hi: f64, delta_floor: f64) -> usize {
    ((hi - lo) / delta_floor).log2().ceil().max(1.0) as usize
}

/// Finds `λ̃` in `(lo, hi]` whose count equals `k0`.
///
/// `counting` must be nondecreasing in `λ̃`. The upper bound is probed first,
/// then midpoints; every probe counts against [`probe_budget`].
pub fn binary_search_threshold<F, E>(
    mut counting: F,
    k0: usize,
    lo: f64,
    hi: f64,
    delta_floor: f64,
) -> Result<ThresholdSearch, ClusterError>
where
    F: FnMut(f64) -> Result<usize, E>,
    E: std::error::Error + Send + Sync + 'static,
{
    if !lo.is_finite() || !hi.is_finite() || lo >= hi || delta_floor.is_nan() || delta_floor <= 0.0 {
        return Err(ClusterError::BadConfig(format!(
            "need lo < hi and delta_floor > 0, got [{lo}, {hi}] and {delta_floor}"
        )));
    }
    let budget = probe_budget(lo, hi, delta_floor);
    let mut history = Vec::with_capacity(budget);
    let mut probe = |x: f64, history: &mut Vec<(f64, usize)>| -> Result<usize, ClusterError> {
        let c = counting(x).map_err(|e| ClusterError::Counting(Box::new(e)))?;
        history.push((x, c));
        Ok(c)
    };
    let (mut lo, mut hi) = (lo, hi);
    let mut count_hi = probe(hi, &mut history)?;
    if count_hi == k0 {
        return Ok(ThresholdSearch { lambda: hi, k0, history, budget });
    }
    if count_hi < k0 {
        return Err(ClusterError::TargetAboveRange { k0, hi, count: count_hi });
    }
    let mut count_lo = None;
    while history.len() < budget {
        let mid = 0.5 * (lo + hi);
        let c = probe(mid, &mut history)?;
        match c.cmp(&k0) {
            std::cmp::Ordering::Equal => return Ok(ThresholdSearch { lambda: mid, k0, history, budget }),
            std::cmp::Ordering::Less => {
                lo = mid;
                count_lo = Some(c);
            }
            std::cmp::Ordering::Greater => {
                hi = mid;
                count_hi = c;
            }
        }
    }
    Err(ClusterError::Unreachable { k0, lo, hi, count_lo, count_hi, probes: history.len() })
}

/// Counting callable for [`binary_search_threshold`] on a phase-estimated state.
///
/// An ambiguous counting outcome means at least half the points are marked;
/// it is reported as `N/2` so the count stays nondecreasing in `λ̃`.
pub fn quantum_count_probe<'a>(
    psi_pe: &'a QuantumState,
    opts: &'a CountingOptions,
) -> impl FnMut(f64) -> Result<usize, QsimError> + 'a {
    move |lambda| {
        let oracle = ThresholdOracle::new(lambda, psi_pe.t())?;
        match quantum_counting(psi_pe, &oracle, opts) {
            Ok(est) => Ok(est.k),
            Err(QsimError::Ambiguous { .. }) => Ok(psi_pe.n_points() / 2),
            Err(e) => Err(e),
        }
    }
}
