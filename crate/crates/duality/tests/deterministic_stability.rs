//! Stability of the deterministic marginal flow started from a wrong prior.

use filtstab_core::{chi_square_divergence, Generator, ProbabilityVector, StateFunction};
use filtstab_duality::stochastic_stability_bound;

#[test]
fn two_state_bounds_hold_across_horizons() {
    let a = Generator::two_state(1.0, 2.0).unwrap();
    let mu_bar = a.invariant_measure().unwrap();
    let mu0 = ProbabilityVector::new(vec![0.9, 0.1]).unwrap();
    let f = StateFunction::new(vec![1.0, 0.0]).unwrap();
    for horizon in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let reports = stochastic_stability_bound(&a, &mu_bar, &mu0, &f, horizon).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert!(
                r.verdict,
                "{} failed at T = {horizon}: lhs {:.6e}, rhs {:.6e}",
                r.label, r.lhs, r.rhs
            );
        }
    }
}

/// With two states the density fluctuation lives entirely in the spectral
/// gap eigenspace, so the decay bound is an equality: the certificate
/// cannot be sharpened.
#[test]
fn two_state_density_decay_is_tight() {
    let a = Generator::two_state(1.0, 2.0).unwrap();
    let mu_bar = a.invariant_measure().unwrap();
    let mu0 = ProbabilityVector::new(vec![0.9, 0.1]).unwrap();
    let f = StateFunction::new(vec![1.0, 0.0]).unwrap();
    assert!((chi_square_divergence(&mu0, &mu_bar) - 0.245).abs() < 1e-12);
    for horizon in [0.3, 1.0, 2.0] {
        let reports = stochastic_stability_bound(&a, &mu_bar, &mu0, &f, horizon).unwrap();
        let decay = &reports[0];
        assert_eq!(decay.label, "density_variance_decay");
        let rel = (decay.rhs - decay.lhs).abs() / decay.rhs;
        assert!(rel <= 1e-6, "slack should vanish, got relative gap {rel:.3e}");
    }
}

#[test]
fn cycle_flat_constant_certifies_decay_for_any_prior() {
    let a = Generator::cycle(4, 1.0).unwrap();
    let mu_bar = a.invariant_measure().unwrap();
    let f = StateFunction::new(vec![1.0, 1.0, -1.0, -1.0]).unwrap();
    for mu0 in [
        ProbabilityVector::new(vec![0.5, 0.25, 0.15, 0.1]).unwrap(),
        ProbabilityVector::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap(),
        ProbabilityVector::dirac(4, 2),
    ] {
        let reports = stochastic_stability_bound(&a, &mu_bar, &mu0, &f, 3.0).unwrap();
        for r in &reports {
            assert!(r.verdict, "{} failed: lhs {:.6e}, rhs {:.6e}", r.label, r.lhs, r.rhs);
        }
    }
}
