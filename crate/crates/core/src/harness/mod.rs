//! End-to-end runs: the quantum pipeline in circuit order, classical
//! baselines, agreement scores, report export and timing sweeps.

mod metrics;
mod report;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{eigen_decompose, kmeans, spectral_cluster_with, Spectrum};
use crate::cluster_opt::{extract_partition, hill_climb, ClimbConfig, DEFAULT_RESTARTS};
use crate::data_graph::{
    build_knn_graph, build_laplacian, connected_components, generate_dataset, load_dataset,
    Dataset, DatasetKind, GeneratorParams,
};
use crate::qsim::{
    apply_qpe_with, grover_iteration_count, grover_run, marked_probability,
    prepare_entangled_state, quantum_counting, reduced_density, Backend, CountingOptions,
    RegisterLayout, ThresholdOracle, DEFAULT_COUNTING_SHOTS, DEFAULT_EPSILON0, DEFAULT_QUBIT_CAP,
};
use crate::seeding;

pub use metrics::adjusted_rand_index;
pub use report::{
    export_report, Agreement, Baselines, ExportFormat, Method, QuantumDiagnostics, RunParams,
    RunReport, StageTiming,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    fn stage<E: std::error::Error + Send + Sync + 'static>(stage: &'static str) -> impl FnOnce(E) -> Self {
        move |e| Self::Stage { stage, source: Box::new(e) }
    }

    fn stage_msg(stage: &'static str, msg: String) -> Self {
        Self::Stage { stage, source: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DataSource {
    Generated { kind: DatasetKind, n_points: usize, seed: u64, params: GeneratorParams },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: DataSource,
    pub d: usize,
    /// Threshold `λ̃ = 2^-lambda_exp`.
    pub lambda_exp: u32,
    pub backend: Backend,
    pub t: Option<u32>,
    pub t_prime: Option<u32>,
    pub epsilon0: f64,
    /// Master seed for counting, k-means and hill climbing.
    pub seed: u64,
    /// Measurement shots `n_M` per objective evaluation; `None` is exact.
    pub shots: Option<u64>,
    pub restarts: usize,
    pub counting_shots: usize,
    pub qubit_cap: u32,
    /// Cluster count for classical methods; `None` uses the eigenvalue count below `λ̃`.
    pub k: Option<usize>,
}

impl RunConfig {
    /// Defaults: `d = 8`, `λ̃ = 2^-9`, ideal backend, exact objective.
    pub fn generated(kind: DatasetKind, n_points: usize, data_seed: u64) -> Self {
        Self {
            source: DataSource::Generated {
                kind,
                n_points,
                seed: data_seed,
                params: GeneratorParams::default(),
            },
            d: 8,
            lambda_exp: 9,
            backend: Backend::Ideal,
            t: None,
            t_prime: None,
            epsilon0: DEFAULT_EPSILON0,
            seed: 0,
            shots: None,
            restarts: DEFAULT_RESTARTS,
            counting_shots: DEFAULT_COUNTING_SHOTS,
            qubit_cap: DEFAULT_QUBIT_CAP,
            k: None,
        }
    }

    pub fn from_file(path: impl Into<PathBuf>) -> Self {
        Self { source: DataSource::File(path.into()), ..Self::generated(DatasetKind::File, 2, 0) }
    }

    pub fn lambda_threshold(&self) -> f64 {
        2f64.powi(-(self.lambda_exp as i32))
    }

    fn layout(&self, n: u32) -> Result<RegisterLayout, HarnessError> {
        let cfg = |e: crate::qsim::QsimError| HarnessError::Config(e.to_string());
        let mut layout = RegisterLayout::with_epsilon0(n, self.epsilon0).map_err(cfg)?;
        if let Some(t) = self.t {
            layout = layout.with_t(t).map_err(cfg)?;
        }
        if let Some(tp) = self.t_prime {
            layout = layout.with_t_prime(tp).map_err(cfg)?;
        }
        Ok(layout.with_qubit_cap(self.qubit_cap))
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.lambda_exp > 52 {
            return Err(HarnessError::Config(format!("lambda exponent {} is above 52", self.lambda_exp)));
        }
        if self.restarts == 0 {
            return Err(HarnessError::Config("restarts must be at least 1".into()));
        }
        if self.shots == Some(0) {
            return Err(HarnessError::Config("shots must be at least 1".into()));
        }
        if self.counting_shots == 0 {
            return Err(HarnessError::Config("counting shots must be at least 1".into()));
        }
        if self.k == Some(0) {
            return Err(HarnessError::Config("k must be at least 1".into()));
        }
        Ok(())
    }
}

struct Timer(Vec<StageTiming>);

impl Timer {
    fn run<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T, HarnessError>) -> Result<T, HarnessError> {
        let start = Instant::now();
        let out = f()?;
        self.0.push(StageTiming { stage: stage.to_string(), seconds: start.elapsed().as_secs_f64() });
        Ok(out)
    }
}

/// Everything classical that both the quantum pipeline and the baselines need.
struct Prepared {
    data: Dataset,
    spectrum: Arc<Spectrum>,
    components: usize,
    component_labels: Vec<usize>,
}

fn load(config: &RunConfig) -> Result<Dataset, HarnessError> {
    match &config.source {
        DataSource::Generated { kind, n_points, seed, params } => {
            generate_dataset(*kind, *n_points, *seed, params).map_err(HarnessError::stage("dataset"))
        }
        DataSource::File(path) => load_dataset(path).map_err(HarnessError::stage("dataset")),
    }
}

fn prepare(config: &RunConfig, timer: &mut Timer) -> Result<Prepared, HarnessError> {
    let data = timer.run("dataset", || load(config))?;
    let graph = timer.run("graph", || build_knn_graph(&data, config.d).map_err(HarnessError::stage("graph")))?;
    let (components, component_labels) = connected_components(&graph);
    let laplacian = timer.run("laplacian", || Ok(build_laplacian(&graph)))?;
    let spectrum = timer.run("eigendecomposition", || {
        eigen_decompose(&laplacian.rescaled).map(Arc::new).map_err(HarnessError::stage("eigendecomposition"))
    })?;
    Ok(Prepared { data, spectrum, components, component_labels })
}

fn params(config: &RunConfig, data: &Dataset, layout: &RegisterLayout) -> RunParams {
    RunParams {
        kind: data.kind,
        n_points: data.len(),
        original_n: data.original_len,
        dim: data.dim(),
        d: config.d,
        lambda_exp: config.lambda_exp,
        lambda_threshold: config.lambda_threshold(),
        t: layout.t,
        t_prime: layout.t_prime,
        epsilon0: layout.epsilon0,
        backend: config.backend,
        data_seed: data.seed,
        seed: config.seed,
        shots: config.shots,
        restarts: config.restarts,
        counting_shots: config.counting_shots,
    }
}

fn counting_options(config: &RunConfig, layout: &RegisterLayout) -> CountingOptions {
    CountingOptions {
        t_prime: layout.t_prime,
        shots: config.counting_shots,
        seed: seeding::derive(config.seed, 0),
        qubit_cap: layout.qubit_cap,
    }
}

fn baseline_labels(prep: &Prepared, k: usize, seed: u64) -> Result<Baselines, HarnessError> {
    let n = prep.data.len();
    let k = k.min(n);
    let raw = DMatrix::from_fn(n, prep.data.dim(), |i, j| prep.data.points[i][j]);
    let kmeans_raw = kmeans(&raw, k, seeding::derive(seed, 2)).map_err(HarnessError::stage("kmeans_raw"))?;
    // Algorithm 1 on the raw Laplacian; its eigenvectors equal the rescaled ones
    let classical = spectral_cluster_with(&prep.spectrum, k, seeding::derive(seed, 3))
        .map_err(HarnessError::stage("classical_spectral"))?;
    let keep = prep.data.original_len;
    Ok(Baselines {
        kmeans_raw: kmeans_raw.labels()[..keep].to_vec(),
        classical_spectral: classical.labels()[..keep].to_vec(),
    })
}

/// Method-specific part of a report.
struct Clustering {
    method: Method,
    k: usize,
    labels: Vec<usize>,
    objective: Option<f64>,
    quantum: Option<QuantumDiagnostics>,
}

fn finish(
    config: &RunConfig,
    prep: Prepared,
    layout: &RegisterLayout,
    clustering: Clustering,
    mut timer: Timer,
) -> Result<RunReport, HarnessError> {
    let Clustering { method, k, labels, objective, quantum } = clustering;
    let baselines = timer.run("baselines", || baseline_labels(&prep, k, config.seed))?;
    let keep = prep.data.original_len;
    let component_labels = prep.component_labels[..keep].to_vec();
    let truth = prep.data.truth.as_ref().map(|t| adjusted_rand_index(&labels, &t[..keep]));
    let agreement = Agreement {
        vs_components: adjusted_rand_index(&labels, &component_labels),
        vs_classical_spectral: adjusted_rand_index(&labels, &baselines.classical_spectral),
        vs_kmeans_raw: adjusted_rand_index(&labels, &baselines.kmeans_raw),
        vs_truth: truth,
        kmeans_raw_vs_components: adjusted_rand_index(&baselines.kmeans_raw, &component_labels),
        classical_spectral_vs_components: adjusted_rand_index(&baselines.classical_spectral, &component_labels),
    };
    Ok(RunReport {
        method,
        params: params(config, &prep.data, layout),
        k,
        objective,
        labels,
        components: prep.components,
        component_labels,
        classical_count: prep.spectrum.count_below(config.lambda_threshold()),
        baselines,
        agreement,
        quantum,
        points: prep.data.points[..keep].to_vec(),
        bbox: prep.data.bbox.clone(),
        timings: timer.0,
    })
}

/// Graph, Laplacian, state preparation, phase estimation, counting, Grover
/// search, partial trace, hill climbing and partition extraction, in that order.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport, HarnessError> {
    config.validate()?;
    let mut timer = Timer(Vec::new());
    let prep = prepare(config, &mut timer)?;
    let n_points = prep.data.len();
    let layout = config.layout(prep.data.qubits())?;
    let oracle = ThresholdOracle::new(config.lambda_threshold(), layout.t)
        .map_err(|e| HarnessError::Config(e.to_string()))?;

    let psi0 = timer.run("state_preparation", || {
        prepare_entangled_state(&layout, config.backend).map_err(HarnessError::stage("state_preparation"))
    })?;
    let psi_pe = timer.run("phase_estimation", || {
        apply_qpe_with(&psi0, &prep.spectrum, &layout).map_err(HarnessError::stage("phase_estimation"))
    })?;
    drop(psi0);
    let count = timer.run("counting", || {
        quantum_counting(&psi_pe, &oracle, &counting_options(config, &layout)).map_err(HarnessError::stage("counting"))
    })?;
    let k = count.k;
    if k == 0 || k > n_points {
        return Err(HarnessError::stage_msg("counting", format!("counted k = {k} clusters for {n_points} points")));
    }
    let r = grover_iteration_count(k, n_points).map_err(HarnessError::stage("grover"))?;
    let psi_out = timer.run("grover", || grover_run(&psi_pe, &oracle, r).map_err(HarnessError::stage("grover")))?;
    drop(psi_pe);
    let marked = marked_probability(&psi_out, &oracle).map_err(HarnessError::stage("grover"))?;
    let rho = timer.run("density", || reduced_density(&psi_out).map_err(HarnessError::stage("density")))?;
    drop(psi_out);
    let climb = timer.run("hill_climb", || {
        let cfg = ClimbConfig {
            restarts: config.restarts,
            seed: seeding::derive(config.seed, 1),
            shots: config.shots,
            max_iters: None,
        };
        hill_climb(&rho, k, &cfg).map_err(HarnessError::stage("hill_climb"))
    })?;
    let partition = timer.run("partition", || {
        extract_partition(&climb.indicator).map_err(HarnessError::stage("partition"))
    })?;
    let labels = partition.labels()[..prep.data.original_len].to_vec();
    let diagnostics = QuantumDiagnostics {
        counting_phase: count.phase,
        theta: count.theta,
        grover_iterations: r,
        marked_probability: marked,
        objective_exact: climb.exact_value,
        climb_restart: climb.restart,
    };
    let clustering = Clustering {
        method: Method::Quantum,
        k,
        labels,
        objective: Some(climb.value),
        quantum: Some(diagnostics),
    };
    finish(config, prep, &layout, clustering, timer)
}

/// Result of running the circuit up to quantum counting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSummary {
    pub k: usize,
    pub theta: f64,
    pub counting_phase: u64,
    /// Count of rescaled eigenvalues below the threshold from the dense solver.
    pub classical_count: usize,
    pub components: usize,
    pub t: u32,
    pub t_prime: u32,
    pub backend: Backend,
}

/// State preparation, phase estimation and counting only.
pub fn run_count(config: &RunConfig) -> Result<CountSummary, HarnessError> {
    config.validate()?;
    let mut timer = Timer(Vec::new());
    let prep = prepare(config, &mut timer)?;
    let layout = config.layout(prep.data.qubits())?;
    let oracle = ThresholdOracle::new(config.lambda_threshold(), layout.t)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let psi0 = prepare_entangled_state(&layout, config.backend).map_err(HarnessError::stage("state_preparation"))?;
    let psi_pe = apply_qpe_with(&psi0, &prep.spectrum, &layout).map_err(HarnessError::stage("phase_estimation"))?;
    drop(psi0);
    let count = quantum_counting(&psi_pe, &oracle, &counting_options(config, &layout)).map_err(HarnessError::stage("counting"))?;
    Ok(CountSummary {
        k: count.k,
        theta: count.theta,
        counting_phase: count.phase,
        classical_count: prep.spectrum.count_below(config.lambda_threshold()),
        components: prep.components,
        t: layout.t,
        t_prime: layout.t_prime,
        backend: config.backend,
    })
}

/// Classical baseline run; `k` comes from the config or the eigenvalue count below `λ̃`.
pub fn run_baseline(config: &RunConfig, method: Method) -> Result<RunReport, HarnessError> {
    config.validate()?;
    if method == Method::Quantum {
        return run_pipeline(config);
    }
    let mut timer = Timer(Vec::new());
    let prep = prepare(config, &mut timer)?;
    let layout = config.layout(prep.data.qubits())?;
    let k = config.k.unwrap_or_else(|| prep.spectrum.count_below(config.lambda_threshold()).max(1));
    if k > prep.data.len() {
        return Err(HarnessError::Config(format!("k = {k} exceeds {} points", prep.data.len())));
    }
    let base = baseline_labels(&prep, k, config.seed)?;
    let labels = match method {
        Method::KmeansRaw => base.kmeans_raw,
        Method::ClassicalSpectral => base.classical_spectral,
        Method::Quantum => unreachable!("handled above"),
    };
    finish(config, prep, &layout, Clustering { method, k, labels, objective: None, quantum: None }, timer)
}

/// One row of a timing sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n_points: usize,
    pub backend: Backend,
    pub k: usize,
    pub seconds: f64,
    pub timings: Vec<StageTiming>,
}

/// Runs `base` once per size in parallel and reports wall-clock times.
pub fn run_bench(base: &RunConfig, sizes: &[usize]) -> Result<Vec<BenchRecord>, HarnessError> {
    sizes
        .par_iter()
        .map(|&n| {
            let mut cfg = base.clone();
            if let DataSource::Generated { n_points, .. } = &mut cfg.source {
                *n_points = n;
            }
            let report = run_pipeline(&cfg)?;
            Ok(BenchRecord {
                n_points: report.params.n_points,
                backend: cfg.backend,
                k: report.k,
                seconds: report.total_seconds(),
                timings: report.timings,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_errors_carry_names() {
        let mut cfg = RunConfig::generated(DatasetKind::Blobs, 16, 1);
        cfg.d = 40;
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(matches!(err, HarnessError::Stage { stage: "graph", .. }), "{err}");
        let mut cfg = RunConfig::generated(DatasetKind::Blobs, 12, 1);
        cfg.d = 4;
        assert!(matches!(run_pipeline(&cfg), Err(HarnessError::Stage { stage: "dataset", .. })));
    }

    #[test]
    fn config_errors() {
        let mut cfg = RunConfig::generated(DatasetKind::Blobs, 16, 1);
        cfg.restarts = 0;
        assert!(matches!(run_pipeline(&cfg), Err(HarnessError::Config(_))));
        let mut cfg = RunConfig::generated(DatasetKind::Blobs, 16, 1);
        cfg.t = Some(0);
        assert!(matches!(run_pipeline(&cfg), Err(HarnessError::Config(_))));
    }

    #[test]
    fn dense_cap_is_a_stage_failure() {
        let mut cfg = RunConfig::generated(DatasetKind::Blobs, 16, 1);
        cfg.backend = Backend::Dense;
        cfg.d = 4;
        cfg.qubit_cap = 10;
        assert!(matches!(run_pipeline(&cfg), Err(HarnessError::Stage { stage: "state_preparation", .. })));
    }
}
