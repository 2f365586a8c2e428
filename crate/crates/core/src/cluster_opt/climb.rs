use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::sample_mean;
use super::{build_indicator, objective, ClusterError, IndicatorMatrix};
use crate::classical::Partition;
use crate::qsim::DensityMatrix;
use crate::seeding;

pub const DEFAULT_RESTARTS: usize = 10;
/// Smallest improvement accepted in exact mode.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimbConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Measurement shots per evaluation; `None` evaluates the objective exactly.
    pub shots: Option<u64>,
    /// Moves per restart; `None` means `4kN`.
    pub max_iters: Option<usize>,
}

impl Default for ClimbConfig {
    fn default() -> Self {
        Self { restarts: DEFAULT_RESTARTS, seed: 0, shots: None, max_iters: None }
    }
}

/// One accepted move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClimbStep {
    pub point: usize,
    pub from: usize,
    pub to: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ClimbResult {
    pub indicator: IndicatorMatrix,
    pub partition: Partition,
    /// Objective as seen by the optimizer: exact, or a fresh shot estimate.
    pub value: f64,
    pub exact_value: f64,
    /// Index of the winning restart.
    pub restart: usize,
    /// Final value of every restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Accepted moves of the winning restart.
    pub trace: Vec<ClimbStep>,
}

impl ClimbResult {
    pub fn write_trace_json<W: std::io::Write>(&self, out: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(out, &self.trace)
    }
}

/// Incremental bookkeeping of `Σ_j S_j / s_j` under single-point moves.
struct Climber<'a> {
    re: &'a DMatrix<f64>,
    k: usize,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    /// `S_j = Σ_{a,b ∈ C_j} Re ρ_ab`.
    within: Vec<f64>,
    /// `row[i * k + j] = Σ_{b ∈ C_j} Re ρ_ib`.
    row: Vec<f64>,
}

impl<'a> Climber<'a> {
    fn new(re: &'a DMatrix<f64>, k: usize, labels: Vec<usize>) -> Self {
        let n = labels.len();
        let mut sizes = vec![0; k];
        let mut row = vec![0.0; n * k];
        for (b, &l) in labels.iter().enumerate() {
            sizes[l] += 1;
            for i in 0..n {
                row[i * k + l] += re[(i, b)];
            }
        }
        let mut within = vec![0.0; k];
        for (i, &l) in labels.iter().enumerate() {
            within[l] += row[i * k + l];
        }
        Self { re, k, labels, sizes, within, row }
    }

    fn value(&self) -> f64 {
        self.within.iter().zip(&self.sizes).map(|(s, &n)| s / n as f64).sum()
    }

    /// Objective change from moving `i` into cluster `to`.
    fn gain(&self, i: usize, to: usize) -> f64 {
        let from = self.labels[i];
        let rii = self.re[(i, i)];
        let (sf, st) = (self.sizes[from] as f64, self.sizes[to] as f64);
        let new_from = self.within[from] - 2.0 * self.row[i * self.k + from] + rii;
        let new_to = self.within[to] + 2.0 * self.row[i * self.k + to] + rii;
        new_from / (sf - 1.0) + new_to / (st + 1.0) - self.within[from] / sf - self.within[to] / st
    }

    fn apply(&mut self, i: usize, to: usize) {
        let from = self.labels[i];
        let rii = self.re[(i, i)];
        self.within[from] += -2.0 * self.row[i * self.k + from] + rii;
        self.within[to] += 2.0 * self.row[i * self.k + to] + rii;
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        self.labels[i] = to;
        for b in 0..self.labels.len() {
            let w = self.re[(b, i)];
            self.row[b * self.k + from] -= w;
            self.row[b * self.k + to] += w;
        }
    }

    /// Legal moves: every point of a cluster with at least two members, to every other cluster.
    fn moves(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.labels.len())
            .filter(|&i| self.sizes[self.labels[i]] > 1)
            .flat_map(move |i| (0..self.k).filter(move |&j| j != self.labels[i]).map(move |j| (i, j)))
    }
}

fn random_labels<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut labels = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        labels[i] = if rank < k { rank } else { rng.random_range(0..k) };
    }
    labels
}

struct RestartOutcome {
    labels: Vec<usize>,
    value: f64,
    trace: Vec<ClimbStep>,
}

fn run_restart(re: &DMatrix<f64>, k: usize, cfg: &ClimbConfig, max_iters: usize, index: usize) -> RestartOutcome {
    let mut rng = seeding::rng(seeding::derive(cfg.seed, index as u64));
    let labels = random_labels(re.nrows(), k, &mut rng);
    let mut climber = Climber::new(re, k, labels);
    let mut trace = Vec::new();
    for _ in 0..max_iters {
        let step = match cfg.shots {
            None => {
                let best = climber.moves().map(|(i, j)| (i, j, climber.gain(i, j))).fold(
                    None,
                    |acc: Option<(usize, usize, f64)>, m| match acc {
                        Some(a) if a.2 >= m.2 => Some(a),
                        _ => Some(m),
                    },
                );
                best.filter(|m| m.2 > EXACT_TOLERANCE).map(|(i, j, _)| (i, j))
            }
            Some(n_m) => {
                let current = climber.value();
                let seen = sample_mean(current, n_m, &mut rng);
                let margin = 2.0 / (n_m as f64).sqrt();
                let moves: Vec<(usize, usize)> = climber.moves().collect();
                let mut best: Option<(usize, usize, f64)> = None;
                for (i, j) in moves {
                    let est = sample_mean(current + climber.gain(i, j), n_m, &mut rng);
                    if best.is_none_or(|b| est > b.2) {
                        best = Some((i, j, est));
                    }
                }
                best.filter(|m| m.2 - seen > margin).map(|(i, j, _)| (i, j))
            }
        };
        let Some((i, j)) = step else { break };
        let from = climber.labels[i];
        climber.apply(i, j);
        trace.push(ClimbStep { point: i, from, to: j, value: climber.value() });
    }
    let value = match cfg.shots {
        None => climber.value(),
        Some(n_m) => sample_mean(climber.value(), n_m, &mut rng),
    };
    RestartOutcome { labels: climber.labels, value, trace }
}

/// Steepest-ascent hill climbing on `Tr(ρXXᵀ)` over single-point
/// reassignments, best of `cfg.restarts` random starts.
///
/// With `cfg.shots = Some(n_M)` every evaluation is a binomial estimate and a
/// move is taken only when its estimate beats the current one by `2/√n_M`.
pub fn hill_climb(rho: &DensityMatrix, k: usize, cfg: &ClimbConfig) -> Result<ClimbResult, ClusterError> {
    let n = rho.dim();
    if k == 0 || k > n {
        return Err(ClusterError::BadK { k, n });
    }
    if cfg.restarts == 0 {
        return Err(ClusterError::BadConfig("restarts must be at least 1".into()));
    }
    if cfg.shots == Some(0) {
        return Err(ClusterError::BadConfig("shots must be at least 1".into()));
    }
    let max_iters = cfg.max_iters.unwrap_or(4 * k * n);
    let re = rho.matrix().map(|z| z.re);
    let outcomes: Vec<RestartOutcome> =
        (0..cfg.restarts).into_par_iter().map(|r| run_restart(&re, k, cfg, max_iters, r)).collect();
    let restart = (0..outcomes.len())
        .fold(0, |best, r| if outcomes[r].value > outcomes[best].value { r } else { best });
    let restart_values = outcomes.iter().map(|o| o.value).collect();
    let win = outcomes.into_iter().nth(restart).expect("restarts >= 1");
    let partition = Partition::new(win.labels, k)?;
    let indicator = build_indicator(&partition)?;
    let exact_value = objective(rho, &indicator)?;
    let value = if cfg.shots.is_none() { exact_value } else { win.value };
    Ok(ClimbResult { indicator, partition, value, exact_value, restart, restart_values, trace: win.trace })
}
