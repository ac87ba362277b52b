//! Observation-free checks: the variance dissipation identity along the
//! dual ODE and the deterministic stability bound on the marginal flow.

use crate::dual_ode::dual_backward_ode;
use crate::error::{DualityError, Result};
use crate::report::BoundReport;
use filtstab_core::{
    chi_square_divergence, density_ratio, energy_slices, standard_pi_constant, variance,
    variance_slices, Generator, ProbabilityVector, StateFunction,
};
use filtstab_core::stats::trapezoid_uniform;
use filtstab_simulate::{default_dt, kolmogorov_forward, TimeGrid};

/// Relative tolerance for the dissipation identity (quadrature-limited).
pub const DISSIPATION_REL_TOL: f64 = 1e-6;
/// Relative tolerance for deterministic inequalities that hold with
/// equality on spectral models (pure rounding slack).
pub const EXACT_DECAY_REL_TOL: f64 = 1e-9;
/// Absolute tolerance for the deterministic stability bounds.
pub const STABILITY_ABS_TOL: f64 = 1e-10;

fn require_invariant(a: &Generator, mu_bar: &ProbabilityVector) -> Result<()> {
    let d = a.dim();
    for j in 0..d {
        let flux: f64 = (0..d).map(|i| mu_bar.get(i) * a.rate(i, j)).sum();
        if flux.abs() > 1e-8 {
            return Err(DualityError::Measure(format!(
                "weights are not invariant for the generator (flux {flux:.3e} at state {j})"
            )));
        }
    }
    Ok(())
}

/// Check, along the dual ODE, that the initial variance plus the integrated
/// energy reproduces the terminal variance, and that the initial variance
/// obeys the spectral decay bound.
///
/// Quadrature is trapezoid on the supplied grid, so the identity residual
/// scales with dt^2; the grid must resolve the relaxation rate for the
/// 1e-6 relative tolerance to be reachable.
pub fn check_markov_variance_dissipation(
    a: &Generator,
    mu_bar: &ProbabilityVector,
    y_terminal: &StateFunction,
    grid: &TimeGrid,
) -> Result<Vec<BoundReport>> {
    require_invariant(a, mu_bar)?;
    let path = dual_backward_ode(a, y_terminal, grid)?;
    let w = mu_bar.as_slice();
    let energies: Vec<f64> = (0..path.n_points())
        .map(|k| energy_slices(w, a, path.point_slice(k)))
        .collect();
    let integral = trapezoid_uniform(&energies, grid.dt());
    let var_initial = variance_slices(w, path.point_slice(0));
    let var_terminal = variance_slices(w, path.point_slice(path.n_points() - 1));

    // Scale floor keeps the relative test meaningful for (near-)constant
    // terminal data, where all three terms vanish together.
    let sup = y_terminal
        .as_slice()
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let scale = var_terminal.max(1e-9 * (1.0 + sup * sup));
    let identity = BoundReport::new(
        "variance_dissipation_identity",
        (var_initial + integral - var_terminal).abs(),
        0.0,
        DISSIPATION_REL_TOL * scale,
        grid.t_end(),
        None,
    );

    let c = standard_pi_constant(a, mu_bar);
    let decay = BoundReport::new(
        "dual_initial_variance_decay",
        var_initial,
        (-c * grid.t_end()).exp() * var_terminal,
        EXACT_DECAY_REL_TOL * scale,
        grid.t_end(),
        None,
    );
    Ok(vec![identity, decay])
}

/// Deterministic stability of the marginal flow started from a wrong
/// prior: the density variance decays at the spectral rate, and the
/// resulting mean gap obeys the Cauchy-Schwarz bound.
pub fn stochastic_stability_bound(
    a: &Generator,
    mu_bar: &ProbabilityVector,
    mu0: &ProbabilityVector,
    f: &StateFunction,
    horizon: f64,
) -> Result<Vec<BoundReport>> {
    require_invariant(a, mu_bar)?;
    if !mu_bar.is_positive(0.0) {
        return Err(DualityError::Measure(
            "stationary weights must be strictly positive".into(),
        ));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(DualityError::Argument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let n_steps = (horizon / default_dt(a)).ceil().max(1.0) as usize;
    let grid = TimeGrid::with_steps(horizon, n_steps);
    let forward = kolmogorov_forward(a, mu0, &grid)?;
    let terminal = forward.terminal()?;

    let var_gamma0 = chi_square_divergence(mu0, mu_bar);
    let gamma_t = StateFunction::new(density_ratio(terminal.as_slice(), mu_bar.as_slice())?)?;
    let c = standard_pi_constant(a, mu_bar);
    let decay_factor = (-c * horizon).exp();

    let density_decay = BoundReport::new(
        "density_variance_decay",
        variance(mu_bar, &gamma_t),
        decay_factor * var_gamma0,
        STABILITY_ABS_TOL,
        horizon,
        None,
    );
    let gap = terminal.expect(f) - mu_bar.expect(f);
    let mean_stability = BoundReport::new(
        "marginal_mean_stability",
        gap * gap,
        decay_factor * var_gamma0 * variance(mu_bar, f),
        STABILITY_ABS_TOL,
        horizon,
        None,
    );
    Ok(vec![density_decay, mean_stability])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_terminal_data_gives_trivial_identity() {
        let a = Generator::two_state(1.0, 2.0).unwrap();
        let mu_bar = a.invariant_measure().unwrap();
        let grid = TimeGrid::with_steps(1.0, 2000);
        let y = StateFunction::constant(2, 5.0);
        let reports = check_markov_variance_dissipation(&a, &mu_bar, &y, &grid).unwrap();
        assert!(reports.iter().all(|r| r.verdict));
        assert!(reports[0].lhs < 1e-12);
    }

    #[test]
    fn non_invariant_weights_are_rejected() {
        let a = Generator::two_state(1.0, 2.0).unwrap();
        let wrong = ProbabilityVector::uniform(2);
        let y = StateFunction::new(vec![1.0, 0.0]).unwrap();
        let grid = TimeGrid::with_steps(1.0, 100);
        assert!(check_markov_variance_dissipation(&a, &wrong, &y, &grid).is_err());
    }

    #[test]
    fn matched_prior_is_a_fixed_point() {
        let a = Generator::two_state(1.0, 2.0).unwrap();
        let mu_bar = a.invariant_measure().unwrap();
        let f = StateFunction::new(vec![1.0, 0.0]).unwrap();
        let reports = stochastic_stability_bound(&a, &mu_bar, &mu_bar, &f, 1.0).unwrap();
        for r in &reports {
            assert!(r.verdict);
            assert_abs_diff_eq!(r.lhs, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.rhs, 0.0, epsilon = 1e-12);
        }
    }
}
