//! `qspectral`: generate datasets, build graphs, count clusters and run the
//! quantum spectral clustering pipeline from the command line.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 when a pipeline
//! stage fails.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qspectral::data_graph::{build_knn_graph, connected_components, generate_dataset, load_dataset, DatasetKind, GeneratorParams};
use qspectral::harness::{
    run_baseline, run_bench, run_count, run_pipeline, DataSource, ExportFormat, HarnessError, Method, RunConfig,
};
use qspectral::qsim::{qubit_cap_from_env, Backend};

#[derive(Parser)]
#[command(name = "qspectral", version, about = "Quantum spectral clustering simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV.
    GenData {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the mutual nearest-neighbor graph and write its edge list.
    Graph {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run state preparation, phase estimation and quantum counting.
    Count {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the full pipeline and export the report.
    Cluster {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a classical baseline.
    Baseline {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// kmeans-raw or classical-spectral.
        #[arg(long, default_value = "classical-spectral")]
        method: Method,
        /// Cluster count; defaults to the eigenvalue count below the threshold.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Time the pipeline over several dataset sizes.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated dataset sizes (powers of two).
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        sizes: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct DataArgs {
    /// moons, blobs or rings.
    #[arg(long, default_value = "moons")]
    kind: DatasetKind,
    /// CSV file to load instead of generating points.
    #[arg(long, conflicts_with = "kind")]
    input: Option<PathBuf>,
    /// Number of points to generate (power of two).
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Seed for data generation and the pipeline.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Separate data seed; defaults to --seed.
    #[arg(long)]
    data_seed: Option<u64>,
}

impl DataArgs {
    fn source(&self) -> DataSource {
        match &self.input {
            Some(path) => DataSource::File(path.clone()),
            None => DataSource::Generated {
                kind: self.kind,
                n_points: self.n,
                seed: self.data_seed.unwrap_or(self.seed),
                params: GeneratorParams::default(),
            },
        }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 8)]
    d: usize,
    /// Threshold exponent e with λ̃ = 2^-e.
    #[arg(long, default_value_t = 9)]
    lambda_exp: u32,
    #[arg(long, default_value = "ideal")]
    backend: Backend,
    /// Measurement shots per objective evaluation; exact when omitted.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Phase-register qubits; defaults to n + ceil(2 + log2(1/(2 eps0))).
    #[arg(long)]
    t: Option<u32>,
    /// Counting-register qubits.
    #[arg(long)]
    t_prime: Option<u32>,
    #[arg(long, default_value_t = qspectral::qsim::DEFAULT_EPSILON0)]
    epsilon0: f64,
    /// Shots sampled from the dense counting register.
    #[arg(long, default_value_t = qspectral::qsim::DEFAULT_COUNTING_SHOTS)]
    counting_shots: usize,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ExportFormat,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, HarnessError> {
        let qubit_cap = qubit_cap_from_env().map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut cfg = RunConfig::generated(DatasetKind::Moons, self.data.n, self.data.seed);
        cfg.source = self.data.source();
        cfg.d = self.d;
        cfg.lambda_exp = self.lambda_exp;
        cfg.backend = self.backend;
        cfg.t = self.t;
        cfg.t_prime = self.t_prime;
        cfg.epsilon0 = self.epsilon0;
        cfg.seed = self.data.seed;
        cfg.shots = self.shots;
        cfg.restarts = self.restarts;
        cfg.counting_shots = self.counting_shots;
        cfg.qubit_cap = qubit_cap;
        Ok(cfg)
    }
}

fn sink(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Distinguishes configuration problems from failures inside a stage.
enum Failure {
    Config(String),
    Stage(String),
    /// The reader of stdout went away; not an error for a command-line tool.
    ClosedPipe,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) => Failure::Config(e.to_string()),
            HarnessError::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe => Failure::ClosedPipe,
            other => Failure::Stage(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<std::io::Error>() {
            Some(io) if io.kind() == std::io::ErrorKind::BrokenPipe => Failure::ClosedPipe,
            _ => Failure::Stage(format!("{e:#}")),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        match e.io_error_kind() {
            Some(std::io::ErrorKind::BrokenPipe) => Failure::ClosedPipe,
            _ => Failure::Stage(e.to_string()),
        }
    }
}

fn load(data: &DataArgs) -> Result<qspectral::data_graph::Dataset, Failure> {
    let result = match data.source() {
        DataSource::Generated { kind, n_points, seed, params } => generate_dataset(kind, n_points, seed, &params),
        DataSource::File(path) => load_dataset(&path),
    };
    result.map_err(|e| Failure::Stage(format!("stage 'dataset' failed: {e}")))
}

fn print_json<T: serde::Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), Failure> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenData { data, out } => {
            let ds = load(&data)?;
            let mut w = sink(&out)?;
            ds.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Graph { data, d, out } => {
            let ds = load(&data)?;
            let g = build_knn_graph(&ds, d).map_err(|e| Failure::Stage(format!("stage 'graph' failed: {e}")))?;
            let (count, _) = connected_components(&g);
            eprintln!("{} nodes, {} edges, {count} connected components", g.n_nodes(), g.edges().len());
            let mut w = sink(&out)?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
        }
        Command::Count { run } => {
            let summary = run_count(&run.config()?)?;
            print_json(&summary, &None)?;
        }
        Command::Cluster { run, output } => {
            let report = run_pipeline(&run.config()?)?;
            eprintln!(
                "k = {}, objective = {:.6}, ARI vs components = {:.4}, {:.3} s",
                report.k,
                report.objective.unwrap_or(f64::NAN),
                report.agreement.vs_components,
                report.total_seconds()
            );
            let mut w = sink(&output.out)?;
            report.write(output.format, &mut w)?;
            w.flush()?;
        }
        Command::Baseline { run, output, method, k } => {
            let mut cfg = run.config()?;
            cfg.k = k;
            let report = run_baseline(&cfg, method)?;
            eprintln!("k = {}, ARI vs components = {:.4}", report.k, report.agreement.vs_components);
            let mut w = sink(&output.out)?;
            report.write(output.format, &mut w)?;
            w.flush()?;
        }
        Command::Bench { run, sizes, out } => {
            let records = run_bench(&run.config()?, &sizes)?;
            for r in &records {
                eprintln!("N = {:>5}  k = {}  {:.4} s", r.n_points, r.k, r.seconds);
            }
            print_json(&records, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ClosedPipe) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Stage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
