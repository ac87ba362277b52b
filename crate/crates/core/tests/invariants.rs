//! Structural invariants under randomized inputs.

use filtstab_core::{
    carre_du_champ, conditional_pi_constants, Generator, ProbabilityVector, StateFunction,
};
use proptest::prelude::*;

/// Random irreducible generator: strictly positive off-diagonal rates.
fn generator_strategy(max_dim: usize) -> impl Strategy<Value = Generator> {
    (2..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec(0.01f64..3.0, n * (n - 1)).prop_map(move |offdiag| {
            let mut rows = vec![vec![0.0; n]; n];
            let mut k = 0;
            for (i, row) in rows.iter_mut().enumerate() {
                for j in 0..n {
                    if i != j {
                        row[j] = offdiag[k];
                        k += 1;
                    }
                }
                row[i] = -row.iter().sum::<f64>();
            }
            Generator::from_rows(&rows).unwrap()
        })
    })
}

proptest! {
    /// The single-target variant can never beat the sum over all targets.
    #[test]
    fn doeblin_never_exceeds_min_column_sum(a in generator_strategy(6)) {
        let c = conditional_pi_constants(&a).unwrap();
        prop_assert!(c.doeblin <= c.min_column_sum + 1e-12);
    }

    /// The local quadratic form only sees differences, so constants shift out.
    #[test]
    fn carre_du_champ_ignores_constant_shifts(
        a in generator_strategy(5),
        shift in -10.0f64..10.0,
    ) {
        let n = a.dim();
        let f: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0).sin() * 2.0).collect();
        let g: Vec<f64> = f.iter().map(|v| v + shift).collect();
        let gf = carre_du_champ(&a, &StateFunction::new(f).unwrap());
        let gg = carre_du_champ(&a, &StateFunction::new(g).unwrap());
        for i in 0..n {
            prop_assert!((gf.get(i) - gg.get(i)).abs() <= 1e-9 * (1.0 + gf.get(i).abs()));
        }
    }

    /// The stationarity equation holds for the computed invariant measure,
    /// and every state carries positive mass when all rates are positive.
    #[test]
    fn invariant_measure_is_stationary(a in generator_strategy(6)) {
        let mu = a.invariant_measure().unwrap();
        let n = a.dim();
        for j in 0..n {
            let mut flux = 0.0;
            for i in 0..n {
                flux += mu.get(i) * a.rate(i, j);
            }
            prop_assert!(flux.abs() <= 1e-10);
            prop_assert!(mu.get(j) > 0.0);
        }
    }

    /// The whole-simplex constants certify the quotient bound uniformly over
    /// random weights; the row-minimum variant does so with weight-dependent
    /// value `sum_i pi(i) min_{j != i} rates(i, j)`, never with the
    /// invariant-measure average.
    #[test]
    fn conditional_family_bounds_random_quotients(
        a in generator_strategy(4),
        raw in proptest::collection::vec(0.05f64..1.0, 8),
        fraw in proptest::collection::vec(-2.0f64..2.0, 4),
    ) {
        let n = a.dim();
        let total: f64 = raw[..n].iter().sum();
        let pi = ProbabilityVector::new(raw[..n].iter().map(|v| v / total).collect())?;
        let f = StateFunction::new(fraw[..n].to_vec())?;
        let e = filtstab_core::energy(&pi, &a, &f);
        let v = filtstab_core::variance(&pi, &f);
        let c = conditional_pi_constants(&a).unwrap();
        for (name, value) in c.conditional_values() {
            if name == "min_row_average" {
                continue;
            }
            prop_assert!(
                e + 1e-9 >= value * v,
                "{name} = {value} violated: energy {e}, variance {v}"
            );
        }
        let m = a.row_min_offdiagonal();
        let beta: f64 = (0..n).map(|i| pi.get(i) * m[i]).sum();
        prop_assert!(e + 1e-9 >= beta * v, "row-minimum bound {beta} violated");
    }
}
