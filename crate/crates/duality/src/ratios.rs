//! Squared-expectation ratio estimators for the terminal spread of the
//! filter pair, plus the exact prior-ratio lower bound they are compared
//! against.
//!
//! With S_T = pi^mu_T(gamma_T) - 1, the two estimators are
//! (E_mismatched[S_T] / E_stationary[S_T])^2 and
//! (E_stationary[A_T S_T] / E_stationary[S_T])^2; in exact arithmetic they
//! estimate the same ratio, because A_T is the observation-measurable
//! change of measure between the two signal laws. Common random numbers
//! across the ensembles keep the ratio variance small, and the delta
//! method supplies standard errors that respect that coupling.

use crate::ensemble::{run_ensemble, SignalLaw, TrialPlan};
use crate::error::{DualityError, Result};
use filtstab_core::stats::{covariance, MeanSe};
use filtstab_core::{min_density_ratio, Model, ProbabilityVector};
use filtstab_simulate::{TimeGrid, WonhamOptions};
use serde::Serialize;

/// One squared ratio of means with its delta-method standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioEstimate {
    pub value: f64,
    pub standard_error: f64,
    /// Set when the shared denominator is within one standard error of
    /// zero; `value` is then reported without any verdict attached.
    pub unstable: bool,
}

/// Squared ratio (mean(num) / mean(den))^2 from paired samples.
///
/// The pairing matters: covariance between the two sample means enters the
/// delta-method variance, and with common random numbers it is strongly
/// positive.
pub fn squared_mean_ratio(num: &[f64], den: &[f64]) -> RatioEstimate {
    let n = MeanSe::from_samples(num);
    let d = MeanSe::from_samples(den);
    let unstable = d.mean.abs() <= d.se;
    if unstable || d.mean == 0.0 {
        return RatioEstimate {
            value: if d.mean == 0.0 { f64::NAN } else { (n.mean / d.mean).powi(2) },
            standard_error: f64::NAN,
            unstable: true,
        };
    }
    let cov_means = covariance(num, den) / num.len() as f64;
    let r = n.mean / d.mean;
    // gradient of n/d at the means: (1/d, -n/d^2)
    let d2 = d.mean * d.mean;
    let var_r = n.se * n.se / d2 + n.mean * n.mean * d.se * d.se / (d2 * d2)
        - 2.0 * n.mean * cov_means / (d2 * d.mean);
    // var of r^2 by one more delta step; clamp tiny negative round-off
    let se = (2.0 * r.abs()) * var_r.max(0.0).sqrt();
    RatioEstimate {
        value: r * r,
        standard_error: se,
        unstable: false,
    }
}

/// The two ratio estimators plus the exact prior bounds.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectationRatios {
    /// Numerator taken under the mismatched signal law.
    pub squared_ratio_mismatched: RatioEstimate,
    /// Numerator reweighted by the change-of-measure factor inside the
    /// stationary ensemble.
    pub squared_ratio_reweighted: RatioEstimate,
    /// (min_x stationary(x) / mismatched(x))^2, computed exactly.
    pub lower_bound: f64,
    /// Same with the ratio inverted; reported alongside because the two
    /// orientations disagree in general and only one can be the intended
    /// certificate (see the consistency tests).
    pub lower_bound_reversed: f64,
    /// Shared denominator E_stationary[S_T].
    pub denominator: MeanSe,
    pub horizon: f64,
    pub n_trials: usize,
}

/// Estimate both squared ratios at the terminal time of `grid`.
pub fn expectation_ratio_estimators(
    model: &Model,
    mu0: &ProbabilityVector,
    mu_bar: &ProbabilityVector,
    grid: &TimeGrid,
    n_trials: usize,
    base_seed: u64,
) -> Result<ExpectationRatios> {
    if n_trials < 2 {
        return Err(DualityError::InsufficientTrials(
            "ratio estimators need at least 2 trials for a standard error".into(),
        ));
    }
    let mut plan = TrialPlan {
        model,
        mu0,
        mu_bar,
        grid,
        signal_law: SignalLaw::Mismatched,
        snapshots: &[],
        beta_kinds: &[],
        gap_function: None,
        options: WonhamOptions::default(),
        base_seed,
    };
    let mismatched = run_ensemble(&plan, n_trials)?;
    plan.signal_law = SignalLaw::Stationary;
    let stationary = run_ensemble(&plan, n_trials)?;

    let num_mismatched: Vec<f64> = mismatched.iter().map(|r| r.s_terminal).collect();
    let den: Vec<f64> = stationary.iter().map(|r| r.s_terminal).collect();
    let num_reweighted: Vec<f64> = stationary
        .iter()
        .map(|r| r.a_terminal * r.s_terminal)
        .collect();

    Ok(ExpectationRatios {
        squared_ratio_mismatched: squared_mean_ratio(&num_mismatched, &den),
        squared_ratio_reweighted: squared_mean_ratio(&num_reweighted, &den),
        lower_bound: min_density_ratio(mu_bar, mu0).powi(2),
        lower_bound_reversed: min_density_ratio(mu0, mu_bar).powi(2),
        denominator: MeanSe::from_samples(&den),
        horizon: grid.t_end(),
        n_trials,
    })
}
