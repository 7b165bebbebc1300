//! Counting, sampling and analysis of (k1,k2)-directed cores.
//!
//! A digraph is a (k1,k2)-dicore when every in-degree is at least `k1` and
//! every out-degree is at least `k2`. This crate provides:
//!
//! - truncated-Poisson machinery (tail series `f_k`, tail probabilities
//!   `p_k`, conditioned moments, and the root solve behind the sequence
//!   model), see [`truncated_poisson`];
//! - exact enumeration of admissible sequences via big-rational
//!   coefficient extraction, with brute-force oracles for tiny instances,
//!   see [`exact_enumeration`];
//! - asymptotic count formulas and the diagnostic functions used in the
//!   source/sink-set bounds, see [`asymptotics`];
//! - uniform sampling of admissible sequences and simple dicores through
//!   the sequence (configuration) model, see [`sampler`];
//! - strong and k-strong connectivity checks with explicit certificates,
//!   see [`graph_analysis`];
//! - core peeling on random multi-digraphs and the numerical emergence
//!   threshold `c*(k1,k2)`, see [`core_threshold`];
//! - reproducible Monte Carlo experiment drivers with CSV/JSON output,
//!   see [`experiments`].

pub mod asymptotics;
pub mod core_threshold;
pub mod error;
pub mod exact_enumeration;
pub mod experiments;
pub mod graph;
pub mod graph_analysis;
pub mod sampler;
pub mod series;
pub mod truncated_poisson;

pub use error::{Error, Result};
pub use graph::{DegreeSequence, LabeledMultiDigraph};
pub use graph_analysis::{ConnectivityCertificate, ConnectivityVerdict, SetDirection};
pub use sampler::AdmissibleSequence;
pub use series::ExactSeries;
pub use truncated_poisson::TruncatedPoissonParams;
