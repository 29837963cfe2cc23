//! Trace-based probabilistic programming with interchangeable MCMC kernels.
//!
//! Models are ordinary Rust closures over a [`trace::ModelCtx`] handle that
//! provides `sample_at`, `observe_at` and `predict`. An execution is recorded
//! as a [`trace::Trace`]: an addressed database of random choices plus the
//! summed log-likelihood of conditioning statements. Inference kernels
//! re-execute the model with selective reuse of recorded choices:
//!
//! * [`mh`] — single-site Metropolis-Hastings proposing from the prior,
//! * [`slice`] — trans-dimensional slice sampling (step-out + shrinkage with
//!   a dimension-jump likelihood correction),
//! * [`scheduler`] — weighted mixtures of the two and budgeted chain loops.
//!
//! Cost is measured in trace-likelihood evaluations (model re-executions),
//! which makes kernels with different per-step costs directly comparable.
//! [`models`] bundles benchmark models with oracle posteriors; [`metrics`]
//! and [`experiment`] turn chains into convergence curves.

pub mod dist;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mh;
pub mod models;
pub mod scheduler;
pub mod slice;
pub mod trace;

pub use dist::{Dist, DistError, Value};
pub use error::InferenceError;
pub use scheduler::{KernelKind, KernelSpec};
pub use trace::{Address, Chain, ModelProgram, Trace};
