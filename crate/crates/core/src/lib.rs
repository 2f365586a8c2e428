//! Desk-scale simulator for quantum spectral clustering.
//!
//! The crate is split along the stages of the algorithm:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`data_graph`] | Point clouds, mutual nearest-neighbor graphs, Laplacians |
//! | [`classical`] | Dense eigensolver, inverse power method, k-means, classical spectral clustering |
//! | [`qsim`] | Entangled-state preparation, phase estimation, threshold Grover search, counting |
//! | [`cluster_opt`] | Indicator matrices, the `Tr(ρXXᵀ)` objective, hill climbing, threshold search |
//! | [`harness`] | End-to-end pipeline, baselines, reports and exports |
//!
//! Every quantum stage has two backends. The dense backend simulates the full
//! amplitude vector over the phase, eigenstate and ancilla registers. The ideal
//! backend stores the state in the Laplacian eigenbasis with exactly rounded
//! phases, which scales to a few thousand points.

pub mod classical;
pub mod cluster_opt;
pub mod data_graph;
pub mod harness;
pub mod qsim;

pub(crate) mod seeding;

pub use nalgebra;
