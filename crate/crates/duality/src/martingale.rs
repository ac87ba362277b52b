//! Zero-mean diagnostics for the running posterior mean of the filter
//! ratio.
//!
//! With gamma_t the ratio of the mismatched to the stationary posterior,
//! the process pi^mubar_t(gamma_t) is identically one path by path, while
//! the claims that pi^mu_t(gamma_t) and its change-of-measure-weighted
//! companion evolve without drift are statistical and are tested here as
//! window increments with Monte Carlo error bars. Biased increments are a
//! reportable finding, not a harness failure: these diagnostics exist to
//! measure whether the running ratio behaves like the terminal-anchored
//! dual process it stands in for.

use crate::ensemble::{run_ensemble, snapshot_indices, SignalLaw, TrialPlan};
use crate::error::{DualityError, Result};
use crate::report::MartingaleDiagnostic;
use filtstab_core::stats::MeanSe;
use filtstab_core::{Model, ProbabilityVector};
use filtstab_simulate::{TimeGrid, WonhamOptions};
use serde::Serialize;

/// Minimum ensemble size for meaningful window standard errors.
pub const MIN_DIAGNOSTIC_TRIALS: usize = 1000;
/// Pathwise tolerance for the normalization identity.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Full diagnostic bundle for one model/prior pair.
#[derive(Debug, Clone, Serialize)]
pub struct RatioDiagnostics {
    /// Largest pathwise deviation of sum_x pi^mu(x) from one across all
    /// trials, both signal laws, and all grid points.
    pub normalization_max_deviation: f64,
    pub normalization_tolerance: f64,
    pub normalization_ok: bool,
    /// Window increments of pi^mu(gamma) under the mismatched signal law.
    pub increments_under_mismatched_law: Vec<MartingaleDiagnostic>,
    /// Window increments of the change-of-measure-weighted ratio mean
    /// under the stationary signal law.
    pub increments_reweighted: Vec<MartingaleDiagnostic>,
    /// E[pi^mu_T(gamma_T)] against its time-zero value, mismatched law.
    pub terminal_mean_mismatched: MartingaleDiagnostic,
    /// E[A_T pi^mu_T(gamma_T)] against the same value, stationary law.
    pub terminal_mean_reweighted: MartingaleDiagnostic,
    pub n_trials: usize,
}

impl RatioDiagnostics {
    pub fn all_pass(&self) -> bool {
        self.normalization_ok
            && self
                .diagnostics()
                .iter()
                .all(|d| d.verdict)
    }

    /// Flat view over every mean/SE diagnostic.
    pub fn diagnostics(&self) -> Vec<&MartingaleDiagnostic> {
        let mut out: Vec<&MartingaleDiagnostic> = Vec::new();
        out.extend(self.increments_under_mismatched_law.iter());
        out.extend(self.increments_reweighted.iter());
        out.push(&self.terminal_mean_mismatched);
        out.push(&self.terminal_mean_reweighted);
        out
    }
}

/// Test the running-ratio identities over `n_windows` equal time windows.
pub fn ratio_martingale_diagnostics(
    model: &Model,
    mu0: &ProbabilityVector,
    mu_bar: &ProbabilityVector,
    grid: &TimeGrid,
    n_windows: usize,
    n_trials: usize,
    base_seed: u64,
) -> Result<RatioDiagnostics> {
    if n_trials < MIN_DIAGNOSTIC_TRIALS {
        return Err(DualityError::InsufficientTrials(format!(
            "window increment tests need at least {MIN_DIAGNOSTIC_TRIALS} trials \
             for stable standard errors, got {n_trials}"
        )));
    }
    if n_windows == 0 || n_windows > grid.n_steps() {
        return Err(DualityError::Argument(format!(
            "window count must lie in 1..={}, got {n_windows}",
            grid.n_steps()
        )));
    }
    let boundaries: Vec<f64> = (0..=n_windows)
        .map(|w| grid.time(w * grid.n_steps() / n_windows))
        .collect();
    let snapshots = snapshot_indices(grid, &boundaries)?;

    let mut plan = TrialPlan {
        model,
        mu0,
        mu_bar,
        grid,
        signal_law: SignalLaw::Mismatched,
        snapshots: &snapshots,
        beta_kinds: &[],
        gap_function: None,
        options: WonhamOptions::default(),
        base_seed,
    };
    let mismatched = run_ensemble(&plan, n_trials)?;
    plan.signal_law = SignalLaw::Stationary;
    let stationary = run_ensemble(&plan, n_trials)?;

    let normalization_max_deviation = mismatched
        .iter()
        .chain(&stationary)
        .map(|r| r.normalization_dev)
        .fold(0.0f64, f64::max);

    let window_label = |name: &str, w: usize| {
        format!("{name}[{:.3},{:.3}]", boundaries[w], boundaries[w + 1])
    };
    let mut increments_under_mismatched_law = Vec::with_capacity(n_windows);
    let mut increments_reweighted = Vec::with_capacity(n_windows);
    for w in 0..n_windows {
        let incr: Vec<f64> = mismatched
            .iter()
            .map(|r| r.ratio_mean[w + 1] - r.ratio_mean[w])
            .collect();
        let m = MeanSe::from_samples(&incr);
        increments_under_mismatched_law.push(MartingaleDiagnostic::new(
            window_label("ratio_mean_increment", w),
            m.mean,
            m.se,
            m.n,
        ));
        let incr: Vec<f64> = stationary
            .iter()
            .map(|r| {
                r.change_of_measure[w + 1] * r.ratio_mean[w + 1]
                    - r.change_of_measure[w] * r.ratio_mean[w]
            })
            .collect();
        let m = MeanSe::from_samples(&incr);
        increments_reweighted.push(MartingaleDiagnostic::new(
            window_label("reweighted_ratio_increment", w),
            m.mean,
            m.se,
            m.n,
        ));
    }

    // Time-zero value of pi^mu(gamma): sum of mu0^2 / mubar, a constant.
    let initial_ratio_mean: f64 = (0..model.dim())
        .map(|x| mu0.get(x) * mu0.get(x) / mu_bar.get(x))
        .sum();
    let last = snapshots.len() - 1;
    let dev: Vec<f64> = mismatched
        .iter()
        .map(|r| r.ratio_mean[last] - initial_ratio_mean)
        .collect();
    let m = MeanSe::from_samples(&dev);
    let terminal_mean_mismatched = MartingaleDiagnostic::new(
        "terminal_ratio_mean_matches_initial",
        m.mean,
        m.se,
        m.n,
    );
    let dev: Vec<f64> = stationary
        .iter()
        .map(|r| r.change_of_measure[last] * r.ratio_mean[last] - initial_ratio_mean)
        .collect();
    let m = MeanSe::from_samples(&dev);
    let terminal_mean_reweighted = MartingaleDiagnostic::new(
        "terminal_reweighted_mean_matches_initial",
        m.mean,
        m.se,
        m.n,
    );

    Ok(RatioDiagnostics {
        normalization_max_deviation,
        normalization_tolerance: NORMALIZATION_TOL,
        normalization_ok: normalization_max_deviation <= NORMALIZATION_TOL,
        increments_under_mismatched_law,
        increments_reweighted,
        terminal_mean_mismatched,
        terminal_mean_reweighted,
        n_trials,
    })
}
