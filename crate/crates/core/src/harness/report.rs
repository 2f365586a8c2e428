use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::data_graph::{BoundingBox, DatasetKind};
use crate::qsim::Backend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quantum,
    KmeansRaw,
    ClassicalSpectral,
}

impl std::str::FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "quantum" => Ok(Self::Quantum),
            "kmeans_raw" => Ok(Self::KmeansRaw),
            "classical_spectral" => Ok(Self::ClassicalSpectral),
            other => Err(HarnessError::Config(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for ExportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            other => Err(HarnessError::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// Resolved parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub kind: DatasetKind,
    /// Points after padding to a power of two.
    pub n_points: usize,
    pub original_n: usize,
    pub dim: usize,
    pub d: usize,
    pub lambda_exp: u32,
    pub lambda_threshold: f64,
    pub t: u32,
    pub t_prime: u32,
    pub epsilon0: f64,
    pub backend: Backend,
    pub data_seed: u64,
    pub seed: u64,
    pub shots: Option<u64>,
    pub restarts: usize,
    pub counting_shots: usize,
}

/// Adjusted Rand indices. `vs_*` compare the reported labels with a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub vs_components: f64,
    pub vs_classical_spectral: f64,
    pub vs_kmeans_raw: f64,
    pub vs_truth: Option<f64>,
    pub kmeans_raw_vs_components: f64,
    pub classical_spectral_vs_components: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub kmeans_raw: Vec<usize>,
    pub classical_spectral: Vec<usize>,
}

/// Circuit-level quantities of a quantum run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumDiagnostics {
    pub counting_phase: u64,
    pub theta: f64,
    pub grover_iterations: u64,
    pub marked_probability: f64,
    pub objective_exact: f64,
    pub climb_restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub params: RunParams,
    pub k: usize,
    /// `Tr(ρXXᵀ)` as seen by the optimizer; absent for classical methods.
    pub objective: Option<f64>,
    /// One label per original (unpadded) point.
    pub labels: Vec<usize>,
    pub components: usize,
    pub component_labels: Vec<usize>,
    /// Count of rescaled eigenvalues below the threshold from the dense solver.
    pub classical_count: usize,
    pub baselines: Baselines,
    pub agreement: Agreement,
    pub quantum: Option<QuantumDiagnostics>,
    pub points: Vec<Vec<f64>>,
    pub bbox: BoundingBox,
    pub timings: Vec<StageTiming>,
}

const PALETTE: [&str; 8] =
    ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

impl RunReport {
    /// Copy with stage timings removed, for byte-level comparisons.
    pub fn without_timings(&self) -> Self {
        Self { timings: Vec::new(), ..self.clone() }
    }

    pub fn total_seconds(&self) -> f64 {
        self.timings.iter().map(|s| s.seconds).sum()
    }

    pub fn write<W: Write>(&self, format: ExportFormat, mut out: W) -> Result<(), HarnessError> {
        match format {
            ExportFormat::Json => {
                serde_json::to_writer_pretty(&mut out, self)
                    .map_err(|e| match e.io_error_kind() {
                        Some(kind) => HarnessError::Io(std::io::Error::new(kind, e)),
                        None => HarnessError::Io(std::io::Error::other(e)),
                    })?;
                writeln!(out)?;
            }
            ExportFormat::Csv => {
                for (p, l) in self.points.iter().zip(&self.labels) {
                    let x = p.first().copied().unwrap_or(0.0);
                    let y = p.get(1).copied().unwrap_or(0.0);
                    writeln!(out, "{x},{y},{l}")?;
                }
            }
            ExportFormat::Svg => self.write_svg(&mut out)?,
        }
        Ok(())
    }

    fn write_svg<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        const SIZE: f64 = 480.0;
        const MARGIN: f64 = 20.0;
        let lo: Vec<f64> = (0..2).map(|c| self.bbox.min.get(c).copied().unwrap_or(0.0)).collect();
        let hi: Vec<f64> = (0..2).map(|c| self.bbox.max.get(c).copied().unwrap_or(1.0)).collect();
        let span = |c: usize| if hi[c] > lo[c] { hi[c] - lo[c] } else { 1.0 };
        let scale = (SIZE - 2.0 * MARGIN) / span(0).max(span(1));
        let (w, h) = (span(0) * scale + 2.0 * MARGIN, span(1) * scale + 2.0 * MARGIN);
        writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#)?;
        writeln!(out, r##"<rect x="0" y="0" width="{w:.1}" height="{h:.1}" fill="#ffffff"/>"##)?;
        writeln!(
            out,
            r##"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="#999999"/>"##,
            span(0) * scale,
            span(1) * scale
        )?;
        for (p, &l) in self.points.iter().zip(&self.labels) {
            let x = MARGIN + (p.first().copied().unwrap_or(0.0) - lo[0]) * scale;
            let y = h - MARGIN - (p.get(1).copied().unwrap_or(0.0) - lo[1]) * scale;
            writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{}"/>"#, PALETTE[l % PALETTE.len()])?;
        }
        writeln!(out, "</svg>")
    }
}

/// Writes `report` to `path` in the given format.
pub fn export_report(report: &RunReport, format: ExportFormat, path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    report.write(format, &mut out)?;
    out.flush()?;
    Ok(())
}
