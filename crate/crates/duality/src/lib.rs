//! Dual processes and decay bounds for the paired-filter experiments.
//!
//! The observation-free side is exact: a terminal-value ODE propagated by
//! matrix exponentials, its pairing with the forward marginal flow, and
//! spectral-rate variance decay. The observed side is Monte Carlo: paired
//! filter ensembles reduced to per-trial summaries, martingale-style drift
//! diagnostics for the running posterior-ratio process, squared-expectation
//! ratio estimators, and the prior-robustness bound with its horizon
//! series.
//!
//! One modelling choice runs through the stochastic checks: the dual
//! process with terminal datum gamma_T (the filter likelihood ratio) is
//! represented by the running ratio gamma_t itself rather than by solving
//! a backward equation, because every reported quantity depends only on
//! terminal values and on gamma_t-observables. The drift diagnostics in
//! [`martingale`] quantify how far that stand-in is from dual behaviour,
//! and every backward bound carries a candidate-free companion phrased in
//! terminal observables only.

pub mod backward;
pub mod dual_ode;
pub mod ensemble;
pub mod error;
pub mod markov;
pub mod martingale;
pub mod ratios;
pub mod report;
pub mod stability;

pub use backward::{
    check_backward_variance_inequality, check_beta_weighted_inequality, BetaWeightedReport,
};
pub use dual_ode::{dual_backward_ode, duality_defect, DualOdePath};
pub use ensemble::{
    extract, run_ensemble, run_trial, snapshot_indices, SignalLaw, TrialPlan, TrialRecord,
};
pub use error::{DualityError, Result};
pub use markov::{check_markov_variance_dissipation, stochastic_stability_bound};
pub use martingale::{ratio_martingale_diagnostics, RatioDiagnostics};
pub use ratios::{expectation_ratio_estimators, squared_mean_ratio, ExpectationRatios, RatioEstimate};
pub use report::{BoundReport, MartingaleDiagnostic, MC_SIGMA};
pub use stability::{filter_stability_bound, GapPoint, StabilityReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
