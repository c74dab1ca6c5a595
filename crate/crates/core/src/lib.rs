//! Multi-view low-rank sparse subspace clustering.
//!
//! Per-view self-expressive representations are learned jointly with ADMM under
//! nuclear-norm and L1 penalties, pulled toward agreement either pairwise or
//! toward a shared centroid. The combined representation is turned into an
//! affinity graph and partitioned with normalized spectral clustering.
//!
//! Matrices follow the columns-are-points convention: a view is `D × N`, a
//! representation is `N × N`.
//!
//! ```no_run
//! use mlrssc::{data, experiment, SolverConfig, Mode, Fidelity};
//!
//! let dataset = data::generate_synthetic(7);
//! let config = SolverConfig::new(Mode::Pairwise, Fidelity::Noisy);
//! let record = experiment::fit(&dataset, &experiment::FitOptions::new(config)).unwrap();
//! println!("{}", record.metrics.unwrap());
//! ```

pub mod admm;
pub mod baselines;
pub mod config;
pub mod data;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod kernel;
mod linalg;
pub mod metrics;
pub mod prox;
pub mod spectral;

pub use admm::{solve, ConvergenceReport, RepresentationResult, SolveInput};
pub use config::{Fidelity, KernelKind, KernelSpec, Mode, SolverConfig};
pub use dataset::{validate_dataset, MultiViewDataset};
pub use error::{Error, Result};
