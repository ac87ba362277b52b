//! Paired filter ensembles.
//!
//! Every Monte Carlo check in this crate consumes the same per-trial data:
//! one hidden path, one observation record, and the two filters started
//! from the mismatched prior and from the stationary prior. A trial is
//! reduced to a small summary record immediately, so ensembles of 10^4+
//! trials never hold full trajectories.
//!
//! Trials are seeded by (base_seed, trial index) only. Running the same
//! trial index under the two signal laws reuses identical random streams —
//! the hidden paths are coupled through inverse-CDF sampling of the initial
//! state — which is what makes ratio estimators across the two ensembles
//! low-variance.

use crate::error::{DualityError, Result};
use filtstab_core::{energy_slices, Model, ProbabilityVector, StateFunction};
use filtstab_simulate::{
    derive_seed, exponential_martingale, pathwise_beta, run_wonham, sample_ctmc_path,
    sample_observations, streams, BetaKind, NoiseWeighting, TimeGrid, WonhamOptions,
};
use filtstab_core::stats::trapezoid_uniform;
use rayon::prelude::*;

/// Which prior drives the hidden signal. The filter pair is the same in
/// both cases; only the law of the simulated data changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalLaw {
    /// Hidden state starts from the mismatched prior.
    Mismatched,
    /// Hidden state starts from the stationary prior.
    Stationary,
}

/// Everything a single trial needs, shared read-only across workers.
#[derive(Clone, Copy)]
pub struct TrialPlan<'a> {
    pub model: &'a Model,
    /// Mismatched filter prior.
    pub mu0: &'a ProbabilityVector,
    /// Stationary filter prior.
    pub mu_bar: &'a ProbabilityVector,
    pub grid: &'a TimeGrid,
    pub signal_law: SignalLaw,
    /// Strictly increasing grid indices at which running quantities are
    /// recorded.
    pub snapshots: &'a [usize],
    /// Pathwise decay-rate processes to integrate along the stationary
    /// filter.
    pub beta_kinds: &'a [BetaKind],
    /// Test function for the posterior-mean gap snapshots; `None` skips
    /// them.
    pub gap_function: Option<&'a StateFunction>,
    pub options: WonhamOptions,
    pub base_seed: u64,
}

/// Per-trial reduction of the paired filter run.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    /// pi^mu_T(gamma_T) - 1; equals the terminal conditional variance of
    /// gamma_T under the stationary filter because pi^mubar(gamma) = 1.
    pub s_terminal: f64,
    /// Terminal value of the change-of-measure exponential.
    pub a_terminal: f64,
    /// max_k |sum_x pi^mu_k(x) - 1|: the pathwise normalization identity.
    pub normalization_dev: f64,
    /// pi^mu(gamma) at each snapshot index.
    pub ratio_mean: Vec<f64>,
    /// Change-of-measure exponential at each snapshot index.
    pub change_of_measure: Vec<f64>,
    /// |pi^mu(f) - pi^mubar(f)| at each snapshot index (empty without a
    /// gap function).
    pub gap: Vec<f64>,
    /// Trapezoid integral of the stationary-filter energy of gamma_t.
    pub energy_integral: f64,
    /// Trapezoid integral of each requested beta process, in
    /// `beta_kinds` order.
    pub beta_integrals: Vec<f64>,
}

/// Map horizons onto grid indices, requiring each horizon to land on the
/// grid within absolute 1e-9.
pub fn snapshot_indices(grid: &TimeGrid, horizons: &[f64]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(horizons.len());
    let mut last: Option<usize> = None;
    for &t in horizons {
        if !(0.0..=grid.t_end() + 1e-9).contains(&t) {
            return Err(DualityError::Argument(format!(
                "horizon {t} outside the grid [0, {}]",
                grid.t_end()
            )));
        }
        let k = ((t / grid.dt()).round() as usize).min(grid.n_steps());
        if (grid.time(k) - t).abs() > 1e-9 {
            return Err(DualityError::Argument(format!(
                "horizon {t} does not land on the grid (nearest point {})",
                grid.time(k)
            )));
        }
        if last.is_some_and(|prev| prev >= k) {
            return Err(DualityError::Argument(
                "horizons must be strictly increasing".into(),
            ));
        }
        last = Some(k);
        out.push(k);
    }
    Ok(out)
}

/// Run one trial and reduce it.
pub fn run_trial(plan: &TrialPlan, trial: u64) -> Result<TrialRecord> {
    let model = plan.model;
    let a = &model.generator;
    let d = model.dim();
    let signal_prior = match plan.signal_law {
        SignalLaw::Mismatched => plan.mu0,
        SignalLaw::Stationary => plan.mu_bar,
    };
    let sig_seed = derive_seed(plan.base_seed, trial, streams::SIGNAL);
    let obs_seed = derive_seed(plan.base_seed, trial, streams::OBSERVATION);
    let path = sample_ctmc_path(a, signal_prior, plan.grid.t_end(), sig_seed)?;
    let z = sample_observations(&path, &model.observation, plan.grid, obs_seed)?;
    let traj_mu = run_wonham(model, &z, plan.mu0, &plan.options)?;
    let traj_bar = run_wonham(model, &z, plan.mu_bar, &plan.options)?;
    let change = exponential_martingale(
        &traj_mu,
        &traj_bar,
        &model.observation,
        &z,
        NoiseWeighting::InverseCovariance,
    )?;

    let n_points = plan.grid.n_points();
    let mut gamma = vec![0.0; d];
    let mut energies = Vec::with_capacity(n_points);
    let mut normalization_dev: f64 = 0.0;
    let mut ratio_mean = Vec::with_capacity(plan.snapshots.len());
    let mut change_of_measure = Vec::with_capacity(plan.snapshots.len());
    let mut gap = Vec::with_capacity(if plan.gap_function.is_some() {
        plan.snapshots.len()
    } else {
        0
    });
    let mut next_snap = plan.snapshots.iter().copied().peekable();
    let mut s_terminal = 0.0;
    for k in 0..n_points {
        let p_mu = traj_mu.point_slice(k);
        let p_bar = traj_bar.point_slice(k);
        let mut mass = 0.0;
        let mut ratio = 0.0;
        for x in 0..d {
            gamma[x] = p_mu[x] / p_bar[x];
            mass += p_mu[x];
            ratio += p_mu[x] * gamma[x];
        }
        normalization_dev = normalization_dev.max((mass - 1.0).abs());
        energies.push(energy_slices(p_bar, a, &gamma));
        if k + 1 == n_points {
            s_terminal = ratio - 1.0;
        }
        if next_snap.peek() == Some(&k) {
            next_snap.next();
            ratio_mean.push(ratio);
            change_of_measure.push(change[k]);
            if let Some(f) = plan.gap_function {
                let fx = f.as_slice();
                let gap_k: f64 = (0..d).map(|x| (p_mu[x] - p_bar[x]) * fx[x]).sum();
                gap.push(gap_k.abs());
            }
        }
    }
    let energy_integral = trapezoid_uniform(&energies, plan.grid.dt());
    let beta_integrals = plan
        .beta_kinds
        .iter()
        .map(|&kind| pathwise_beta(&traj_bar, a, kind).integral())
        .collect();
    Ok(TrialRecord {
        s_terminal,
        a_terminal: *change.last().expect("grid has at least one point"),
        normalization_dev,
        ratio_mean,
        change_of_measure,
        gap,
        energy_integral,
        beta_integrals,
    })
}

/// Run `n_trials` trials concurrently and return the records in trial
/// order, so downstream pairwise reductions are scheduling-independent.
pub fn run_ensemble(plan: &TrialPlan, n_trials: usize) -> Result<Vec<TrialRecord>> {
    if n_trials == 0 {
        return Err(DualityError::Argument("ensemble needs at least one trial".into()));
    }
    (0..n_trials as u64)
        .into_par_iter()
        .map(|trial| run_trial(plan, trial))
        .collect()
}

/// Extract one scalar per record, preserving trial order.
pub fn extract<F: Fn(&TrialRecord) -> f64>(records: &[TrialRecord], get: F) -> Vec<f64> {
    records.iter().map(get).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use filtstab_core::Generator;
    use filtstab_core::ObservationModel;

    fn plan_fixture() -> (Model, ProbabilityVector, ProbabilityVector, TimeGrid) {
        let a = Generator::two_state(1.0, 2.0).unwrap();
        let obs = ObservationModel::scalar(vec![1.0, 0.0], 1.0).unwrap();
        let mu_bar = a.invariant_measure().unwrap();
        let model = Model::new(a, obs).unwrap();
        let mu0 = ProbabilityVector::new(vec![0.9, 0.1]).unwrap();
        let grid = TimeGrid::with_steps(1.0, 500);
        (model, mu0, mu_bar, grid)
    }

    #[test]
    fn snapshot_indices_require_grid_alignment() {
        let grid = TimeGrid::with_steps(2.0, 2000);
        let idx = snapshot_indices(&grid, &[0.0, 0.5, 2.0]).unwrap();
        assert_eq!(idx, vec![0, 500, 2000]);
        assert!(snapshot_indices(&grid, &[0.5004]).is_err());
        assert!(snapshot_indices(&grid, &[0.5, 0.5]).is_err());
        assert!(snapshot_indices(&grid, &[2.5]).is_err());
    }

    #[test]
    fn matched_priors_make_every_trial_degenerate() {
        let (model, _, mu_bar, grid) = plan_fixture();
        let snaps = [0usize, 250, 500];
        let plan = TrialPlan {
            model: &model,
            mu0: &mu_bar,
            mu_bar: &mu_bar,
            grid: &grid,
            signal_law: SignalLaw::Stationary,
            snapshots: &snaps,
            beta_kinds: &[],
            gap_function: None,
            options: WonhamOptions::default(),
            base_seed: 7,
        };
        let rec = run_trial(&plan, 3).unwrap();
        // Identical filter inputs give gamma = 1 bitwise, so the gap terms
        // vanish exactly; the ratio means inherit only the ulp-level slack
        // of the per-step renormalization.
        assert_eq!(rec.a_terminal, 1.0);
        assert!(rec.change_of_measure.iter().all(|&v| v == 1.0));
        assert_eq!(rec.energy_integral, 0.0);
        assert!(rec.s_terminal.abs() < 1e-13);
        assert!(rec.ratio_mean.iter().all(|&v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn ensemble_order_is_deterministic() {
        let (model, mu0, mu_bar, grid) = plan_fixture();
        let snaps = [500usize];
        let plan = TrialPlan {
            model: &model,
            mu0: &mu0,
            mu_bar: &mu_bar,
            grid: &grid,
            signal_law: SignalLaw::Stationary,
            snapshots: &snaps,
            beta_kinds: &[BetaKind::MinRow],
            gap_function: None,
            options: WonhamOptions::default(),
            base_seed: 42,
        };
        let first = run_ensemble(&plan, 8).unwrap();
        let second = run_ensemble(&plan, 8).unwrap();
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(a.s_terminal, b.s_terminal);
            assert_eq!(a.beta_integrals, b.beta_integrals);
        }
        // trial records must match a serial one-trial run as well
        let solo = run_trial(&plan, 5).unwrap();
        assert_eq!(solo.s_terminal, first[5].s_terminal);
    }

    #[test]
    fn signal_law_changes_data_but_not_seeds() {
        let (model, mu0, mu_bar, grid) = plan_fixture();
        let snaps = [500usize];
        let mut plan = TrialPlan {
            model: &model,
            mu0: &mu0,
            mu_bar: &mu_bar,
            grid: &grid,
            signal_law: SignalLaw::Mismatched,
            snapshots: &snaps,
            beta_kinds: &[],
            gap_function: None,
            options: WonhamOptions::default(),
            base_seed: 9,
        };
        let under_mu = run_ensemble(&plan, 16).unwrap();
        plan.signal_law = SignalLaw::Stationary;
        let under_bar = run_ensemble(&plan, 16).unwrap();
        // Coupled trials share noise, so most paths coincide entirely and
        // the records agree; they must differ on at least one trial where
        // the initial states split.
        let diffs = under_mu
            .iter()
            .zip(&under_bar)
            .filter(|(a, b)| a.s_terminal != b.s_terminal)
            .count();
        assert!(diffs > 0, "priors 0.9 vs 2/3 must split some initial states");
        assert!(diffs < 16, "coupling must keep most trials identical");
    }
}
