//! Variance inequalities for the filter ratio, checked by Monte Carlo.
//!
//! The checks in this module take the running ratio gamma_t as a stand-in
//! for a terminal-anchored dual process that is not reconstructed (see the
//! crate docs). The literal backward inequalities are evaluated exactly as
//! stated for that candidate; when the candidate fails them, the verdict is
//! reported as-is. Each check also carries a companion inequality phrased
//! purely in terminal observables, which does not depend on the candidate
//! choice and is expected to hold whenever the conditional decay constant
//! is valid.

use crate::ensemble::{extract, run_ensemble, SignalLaw, TrialPlan};
use crate::error::{DualityError, Result};
use crate::report::{BoundReport, MC_SIGMA};
use filtstab_core::stats::{covariance, MeanSe};
use filtstab_core::{chi_square_divergence, conditional_pi_constants, Model, ProbabilityVector};
use filtstab_simulate::{BetaKind, TimeGrid, WonhamOptions};
use serde::Serialize;

pub(crate) fn resolve_constant(model: &Model, c: Option<f64>) -> Result<f64> {
    let c = match c {
        Some(v) => v,
        None => conditional_pi_constants(&model.generator)?
            .best_conditional()
            .unwrap_or(0.0),
    };
    if c > 0.0 {
        Ok(c)
    } else {
        Err(DualityError::NoDecayConstant(format!(
            "conditional decay constant {c} is not positive; \
             use the pathwise-weighted check (check_beta_weighted_inequality) instead"
        )))
    }
}

fn paired_ensembles(
    model: &Model,
    mu0: &ProbabilityVector,
    mu_bar: &ProbabilityVector,
    grid: &TimeGrid,
    n_trials: usize,
    base_seed: u64,
    beta_kinds: &[BetaKind],
) -> Result<(Vec<crate::ensemble::TrialRecord>, Vec<crate::ensemble::TrialRecord>)> {
    if n_trials < 2 {
        return Err(DualityError::InsufficientTrials(
            "variance checks need at least 2 trials for a standard error".into(),
        ));
    }
    let mut plan = TrialPlan {
        model,
        mu0,
        mu_bar,
        grid,
        signal_law: SignalLaw::Mismatched,
        snapshots: &[],
        beta_kinds,
        gap_function: None,
        options: WonhamOptions::default(),
        base_seed,
    };
    let mismatched = run_ensemble(&plan, n_trials)?;
    plan.signal_law = SignalLaw::Stationary;
    let stationary = run_ensemble(&plan, n_trials)?;
    Ok((mismatched, stationary))
}

/// Companion bound in terminal observables:
/// (E_mismatched[S_T])^2 <= rhs_factor * E_stationary[discounted terminal
/// variance]. `num` and `den` are paired by common random numbers.
fn companion_report(
    label: &str,
    num: &[f64],
    den: &[f64],
    rhs_factor: f64,
    horizon: f64,
) -> BoundReport {
    let n = MeanSe::from_samples(num);
    let d = MeanSe::from_samples(den);
    let cov_means = covariance(num, den) / num.len() as f64;
    // gradient of n^2 - K d at the means: (2n, -K)
    let grad_n = 2.0 * n.mean;
    let var_diff = grad_n * grad_n * n.se * n.se + rhs_factor * rhs_factor * d.se * d.se
        - 2.0 * grad_n * rhs_factor * cov_means;
    BoundReport::new(
        label,
        n.mean * n.mean,
        rhs_factor * d.mean,
        MC_SIGMA * var_diff.max(0.0).sqrt(),
        horizon,
        Some(num.len()),
    )
}

/// Check the uniform-constant backward inequalities for the candidate
/// ratio process.
///
/// Reports, in order:
/// 1. initial variance against the exponentially discounted mean terminal
///    conditional variance (literal backward bound for the candidate);
/// 2. initial variance plus mean integrated conditional energy against the
///    mean terminal conditional variance (literal energy inequality);
/// 3. the candidate-free companion in terminal observables.
pub fn check_backward_variance_inequality(
    model: &Model,
    mu0: &ProbabilityVector,
    mu_bar: &ProbabilityVector,
    grid: &TimeGrid,
    n_trials: usize,
    base_seed: u64,
    c: Option<f64>,
) -> Result<Vec<BoundReport>> {
    let c = resolve_constant(model, c)?;
    let (mismatched, stationary) =
        paired_ensembles(model, mu0, mu_bar, grid, n_trials, base_seed, &[])?;
    let horizon = grid.t_end();
    let var_gamma0 = chi_square_divergence(mu0, mu_bar);
    let decay = (-c * horizon).exp();

    let terminal = extract(&stationary, |r| r.s_terminal);
    let term = MeanSe::from_samples(&terminal);
    let literal_decay = BoundReport::new(
        "backward_initial_variance_decay",
        var_gamma0,
        decay * term.mean,
        MC_SIGMA * decay * term.se,
        horizon,
        Some(n_trials),
    );

    let lhs_samples: Vec<f64> = stationary
        .iter()
        .map(|r| var_gamma0 + r.energy_integral)
        .collect();
    let diff = MeanSe::from_paired_diff(&lhs_samples, &terminal);
    let energy_ineq = BoundReport::new(
        "backward_energy_inequality",
        var_gamma0 + MeanSe::from_samples(&extract(&stationary, |r| r.energy_integral)).mean,
        term.mean,
        MC_SIGMA * diff.se,
        horizon,
        Some(n_trials),
    );

    // (E[S^mu])^2 <= exp(-cT) var(gamma_0) E[S^mubar]
    let companion = companion_report(
        "terminal_ratio_decay",
        &extract(&mismatched, |r| r.s_terminal),
        &terminal,
        decay * var_gamma0,
        horizon,
    );

    Ok(vec![literal_decay, energy_ineq, companion])
}

/// Result of the pathwise-discounted variance check.
#[derive(Debug, Clone, Serialize)]
pub struct BetaWeightedReport {
    /// Literal discounted bound for the candidate ratio process.
    pub bound: BoundReport,
    /// Candidate-free companion in terminal observables.
    pub companion: BoundReport,
    /// Mean of the integrated discount exponent across trials.
    pub mean_discount_exponent: f64,
    /// True only when the bound holds *and* the discount is nontrivial;
    /// a identically-zero exponent certifies nothing.
    pub decay_certified: bool,
}

/// Check the pathwise-discounted backward inequality with the selected
/// decay-rate process.
pub fn check_beta_weighted_inequality(
    model: &Model,
    mu0: &ProbabilityVector,
    mu_bar: &ProbabilityVector,
    grid: &TimeGrid,
    n_trials: usize,
    base_seed: u64,
    kind: BetaKind,
) -> Result<BetaWeightedReport> {
    let (mismatched, stationary) =
        paired_ensembles(model, mu0, mu_bar, grid, n_trials, base_seed, &[kind])?;
    let horizon = grid.t_end();
    let var_gamma0 = chi_square_divergence(mu0, mu_bar);

    let discounted: Vec<f64> = stationary
        .iter()
        .map(|r| (-r.beta_integrals[0]).exp() * r.s_terminal)
        .collect();
    let disc = MeanSe::from_samples(&discounted);
    let bound = BoundReport::new(
        "backward_discounted_decay",
        var_gamma0,
        disc.mean,
        MC_SIGMA * disc.se,
        horizon,
        Some(n_trials),
    );

    // (E[S^mu])^2 <= var(gamma_0) * E[exp(-int beta) S^mubar]
    let companion = companion_report(
        "discounted_terminal_ratio_decay",
        &extract(&mismatched, |r| r.s_terminal),
        &discounted,
        var_gamma0,
        horizon,
    );

    let exponents = MeanSe::from_samples(&extract(&stationary, |r| r.beta_integrals[0]));
    Ok(BetaWeightedReport {
        decay_certified: bound.verdict && exponents.mean > 0.0,
        bound,
        companion,
        mean_discount_exponent: exponents.mean,
    })
}
