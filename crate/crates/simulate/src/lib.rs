//! Sampling and filtering for finite-state signals observed in additive
//! Gaussian noise: exact event-driven signal paths, integrated observation
//! increments, the Wonham filter (splitting and Euler discretizations),
//! the observation-free forward equation, likelihood ratios between
//! mismatched-prior filters, and pathwise decay-rate processes.

pub mod beta;
pub mod ctmc;
pub mod dump;
pub mod error;
pub mod grid;
pub mod likelihood;
pub mod observations;
pub mod rng;
pub mod wonham;

pub use beta::{pathwise_beta, BetaKind, BetaPath};
pub use ctmc::{sample_ctmc_path, sample_state, CtmcPath};
pub use error::{Result, SimError};
pub use grid::{default_dt, TimeGrid};
pub use likelihood::{
    exponential_martingale, likelihood_ratio, likelihood_ratio_at, NoiseWeighting,
};
pub use observations::{sample_observations, ObservationPath};
pub use rng::{derive_seed, stream_rng, streams};
pub use wonham::{kolmogorov_forward, run_wonham, FilterTrajectory, SchemeTag, WonhamOptions};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

use filtstab_core::{energy, variance, Generator, ProbabilityVector, StateFunction};

/// Energy quadratic form evaluated at a posterior: the same formula as the
/// stationary energy, weighted by the conditional law instead of the
/// invariant measure.
pub fn conditional_energy(pi: &ProbabilityVector, a: &Generator, f: &StateFunction) -> f64 {
    energy(pi, a, f)
}

/// Variance of f under a posterior, centered at the posterior mean.
pub fn conditional_variance(pi: &ProbabilityVector, f: &StateFunction) -> f64 {
    variance(pi, f)
}
