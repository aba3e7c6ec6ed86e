//! Nonparametric clustering of noisy finite-length observations of
//! stationary random processes.
//!
//! Observations are compared through the half-L1 distance between their
//! Blackman–Tukey PSD estimates. Two clustering algorithms are provided:
//!
//! * [`nnpc`]: q-nearest-neighbor graph with `exp(-2 d)` edge weights,
//!   partitioned by normalized spectral clustering (the cluster count can be
//!   estimated with the eigengap heuristic);
//! * [`km`]: one k-means pass with farthest-point initialization.
//!
//! [`generators`] synthesizes labeled ARMA benchmark data, [`theory`]
//! evaluates the clustering condition and the predicates it implies, and
//! [`experiment`] runs seeded Monte Carlo sweeps.
//!
//! With the default `parallel` feature, per-observation and per-trial loops
//! run on rayon; see [`Execution`].

pub mod distances;
mod error;
mod exec;
pub mod experiment;
pub mod generators;
pub mod km;
mod labeling;
pub mod metrics;
pub mod nnpc;
pub mod numerics;
pub mod spectra;
pub mod theory;

pub use error::{Error, Result};
pub use exec::Execution;
pub use labeling::Labeling;
