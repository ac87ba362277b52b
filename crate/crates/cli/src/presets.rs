//! Built-in experiments over the reference models, runnable without any
//! config file: `filtstab preset <name>`.

use crate::config::{CheckKind, ExperimentSpec};
use crate::error::{CliError, Result};
use filtstab_core::{Generator, Model, ObservationModel, ProbabilityVector, StateFunction};

pub const PRESET_NAMES: [&str; 3] = ["example1", "counterexample", "example4"];

pub fn preset_spec(name: &str) -> Result<ExperimentSpec> {
    match name {
        // Two-state chain with rates 1 and 2, observing state 0 at unit
        // noise. Small enough that every constant is known in closed form,
        // which makes it the default end-to-end tour.
        "example1" => {
            let a = Generator::two_state(1.0, 2.0)?;
            let mu_bar = a.invariant_measure()?;
            let obs = ObservationModel::scalar(vec![1.0, 0.0], 1.0)?;
            Ok(ExperimentSpec {
                model: Model::new(a, obs)?,
                model_ref: "builtin:example1".into(),
                mu0: ProbabilityVector::new(vec![0.9, 0.1])?,
                mu_bar,
                test_functions: vec![StateFunction::new(vec![1.0, 0.0])?],
                horizons: vec![0.5, 1.0, 2.0, 3.0, 4.0],
                dt: 1e-3,
                n_trials: 2000,
                seed: 17,
                checks: vec![
                    CheckKind::Constants,
                    CheckKind::MarginalStability,
                    CheckKind::RatioDiagnostics,
                    CheckKind::BackwardBound,
                    CheckKind::DiscountedBound,
                    CheckKind::RatioEstimators,
                    CheckKind::StabilityCertificate,
                    CheckKind::RateRegression,
                ],
                rate_window: None,
            })
        }

        // Four-state cycle at unit rate. Perfectly ergodic as a chain, yet
        // every conditional decay constant vanishes: the alternating test
        // function has zero conditional energy but unit conditional
        // variance at the half-half conditioning point, so no certificate
        // can exist and the stability check must refuse to produce one.
        "counterexample" => {
            let a = Generator::cycle(4, 1.0)?;
            let mu_bar = a.invariant_measure()?;
            let obs = ObservationModel::scalar(vec![1.0, 0.0, 1.0, 0.0], 1.0)?;
            Ok(ExperimentSpec {
                model: Model::new(a, obs)?,
                model_ref: "builtin:counterexample".into(),
                mu0: ProbabilityVector::new(vec![0.5, 0.0, 0.5, 0.0])?,
                mu_bar,
                test_functions: vec![StateFunction::new(vec![1.0, 1.0, -1.0, -1.0])?],
                horizons: vec![1.0, 2.0, 3.0],
                dt: 1e-3,
                n_trials: 1000,
                seed: 23,
                checks: vec![
                    CheckKind::Constants,
                    CheckKind::ConditionalDegeneracy,
                    CheckKind::StabilityCertificate,
                ],
                rate_window: None,
            })
        }

        // Three-state chain whose rows have distinct minima, so the
        // pathwise discount rate genuinely moves with the posterior.
        "example4" => {
            let a = Generator::from_rows(&[
                vec![-3.0, 1.0, 2.0],
                vec![4.0, -5.0, 1.0],
                vec![2.0, 3.0, -5.0],
            ])?;
            let mu_bar = a.invariant_measure()?;
            let obs = ObservationModel::scalar(vec![1.0, 0.0, 0.0], 1.0)?;
            Ok(ExperimentSpec {
                model: Model::new(a, obs)?,
                model_ref: "builtin:example4".into(),
                mu0: ProbabilityVector::new(vec![0.2, 0.5, 0.3])?,
                mu_bar,
                test_functions: vec![StateFunction::new(vec![1.0, 0.0, 0.0])?],
                horizons: vec![0.5, 1.0, 1.5, 2.0],
                dt: 5e-4,
                n_trials: 2000,
                seed: 31,
                checks: vec![
                    CheckKind::Constants,
                    CheckKind::MarginalStability,
                    CheckKind::DiscountedBound,
                    CheckKind::StabilityCertificate,
                    CheckKind::RateRegression,
                ],
                rate_window: None,
            })
        }

        other => Err(CliError::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for name in PRESET_NAMES {
            let spec = preset_spec(name).unwrap();
            assert!(!spec.checks.is_empty());
            assert_eq!(spec.mu0.dim(), spec.model.dim());
        }
        assert!(preset_spec("example2").is_err());
    }
}
