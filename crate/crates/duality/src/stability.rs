//! Monte Carlo check of the prior-robustness bound for the filter pair:
//! the squared mean posterior gap, scaled by the exact prior-ratio floor,
//! against the exponentially discounted product of initial density
//! variance and test-function variance. One long ensemble is snapshotted
//! at every horizon, so the reported series shares trials across horizons.

use crate::backward::resolve_constant;
use crate::ensemble::{run_ensemble, snapshot_indices, SignalLaw, TrialPlan};
use crate::error::{DualityError, Result};
use crate::report::{BoundReport, MC_SIGMA};
use filtstab_core::stats::MeanSe;
use filtstab_core::{
    chi_square_divergence, min_density_ratio, variance, Model, ProbabilityVector, StateFunction,
};
use filtstab_simulate::{TimeGrid, WonhamOptions};
use serde::Serialize;

/// Mean absolute posterior-mean gap at one horizon.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapPoint {
    pub horizon: f64,
    pub mean_gap: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    /// One bound per horizon, in horizon order.
    pub bounds: Vec<BoundReport>,
    /// Raw gap series for decay-rate regression.
    pub gap_series: Vec<GapPoint>,
    /// Exact floor min_x stationary(x) / mismatched(x).
    pub prior_ratio_floor: f64,
    /// Decay constant used on the right-hand side.
    pub decay_constant: f64,
    /// Set when the floor vanishes; the left side is then identically zero
    /// and the bounds certify nothing.
    pub degenerate_prior_ratio: bool,
    pub n_trials: usize,
}

/// Check the stability bound at each horizon with a shared trial ensemble
/// under the stationary signal law.
#[allow(clippy::too_many_arguments)]
pub fn filter_stability_bound(
    model: &Model,
    mu0: &ProbabilityVector,
    mu_bar: &ProbabilityVector,
    f: &StateFunction,
    horizons: &[f64],
    dt: f64,
    n_trials: usize,
    base_seed: u64,
    c: Option<f64>,
) -> Result<StabilityReport> {
    if horizons.is_empty() {
        return Err(DualityError::Argument("at least one horizon is required".into()));
    }
    if n_trials < 2 {
        return Err(DualityError::InsufficientTrials(
            "stability bounds need at least 2 trials for standard errors".into(),
        ));
    }
    let c = resolve_constant(model, c)?;
    let t_max = *horizons.last().unwrap();
    let grid = TimeGrid::from_step(t_max, dt)?;
    let snapshots = snapshot_indices(&grid, horizons)?;

    let plan = TrialPlan {
        model,
        mu0,
        mu_bar,
        grid: &grid,
        signal_law: SignalLaw::Stationary,
        snapshots: &snapshots,
        beta_kinds: &[],
        gap_function: Some(f),
        options: WonhamOptions::default(),
        base_seed,
    };
    let records = run_ensemble(&plan, n_trials)?;

    let floor = min_density_ratio(mu_bar, mu0);
    let degenerate = !(floor > 0.0);
    let var_gamma0 = chi_square_divergence(mu0, mu_bar);
    let var_f = variance(mu_bar, f);

    let mut bounds = Vec::with_capacity(horizons.len());
    let mut gap_series = Vec::with_capacity(horizons.len());
    for (i, &t) in horizons.iter().enumerate() {
        let samples: Vec<f64> = records.iter().map(|r| r.gap[i]).collect();
        let m = MeanSe::from_samples(&samples);
        gap_series.push(GapPoint {
            horizon: t,
            mean_gap: m.mean,
            standard_error: m.se,
        });
        let a2 = floor * floor;
        bounds.push(BoundReport::new(
            "filter_stability_bound",
            a2 * m.mean * m.mean,
            (-c * t).exp() * var_gamma0 * var_f,
            MC_SIGMA * 2.0 * a2 * m.mean * m.se,
            t,
            Some(n_trials),
        ));
    }

    Ok(StabilityReport {
        bounds,
        gap_series,
        prior_ratio_floor: floor,
        decay_constant: c,
        degenerate_prior_ratio: degenerate,
        n_trials,
    })
}
