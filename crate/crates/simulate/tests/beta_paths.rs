//! Pathwise decay-rate processes: closed forms, pointwise lower bounds,
//! degeneracy flags, and the long-horizon ergodic average.

use filtstab_core::{
    conditional_pi_constants, Generator, Model, ObservationModel, ProbabilityVector,
};
use filtstab_simulate::{
    default_dt, kolmogorov_forward, pathwise_beta, run_wonham, sample_ctmc_path,
    sample_observations, BetaKind, TimeGrid, WonhamOptions,
};

fn three_state() -> Generator {
    Generator::from_rows(&[
        vec![-3.0, 1.0, 2.0],
        vec![4.0, -5.0, 1.0],
        vec![2.0, 3.0, -5.0],
    ])
    .unwrap()
}

#[test]
fn two_state_rayleigh_matches_closed_form() {
    // For two states every nonconstant f gives the same quotient
    // (pi_1 l1 + pi_2 l2) / (pi_1 pi_2).
    let a = Generator::two_state(1.0, 2.0).unwrap();
    let obs = ObservationModel::scalar(vec![1.0, 0.0], 1.0).unwrap();
    let model = Model::new(a.clone(), obs).unwrap();
    let mu_bar = a.invariant_measure().unwrap();
    let grid = TimeGrid::with_steps(1.0, 200);
    let path = sample_ctmc_path(&a, &mu_bar, 1.0, 41).unwrap();
    let z = sample_observations(&path, &model.observation, &grid, 42).unwrap();
    let traj = run_wonham(&model, &z, &mu_bar, &WonhamOptions::default()).unwrap();
    let beta = pathwise_beta(&traj, &a, BetaKind::ExactRayleigh);
    assert!(!beta.is_degenerate());
    for k in 0..grid.n_points() {
        let p = traj.point_slice(k);
        let expected = (p[0] * 1.0 + p[1] * 2.0) / (p[0] * p[1]);
        let rel = (beta.values()[k] - expected).abs() / expected;
        assert!(rel <= 1e-9, "k={k}: {} vs {expected}", beta.values()[k]);
        assert!(beta.values()[k] >= 3.0 - 1e-9, "below min column sum at {k}");
    }
}

#[test]
fn rayleigh_beta_dominates_family_constants_along_trajectories() {
    let a = three_state();
    let obs = ObservationModel::scalar(vec![1.0, 0.0, 0.0], 1.0).unwrap();
    let model = Model::new(a.clone(), obs).unwrap();
    let mu_bar = a.invariant_measure().unwrap();
    let constants = conditional_pi_constants(&a).unwrap();
    let grid = TimeGrid::with_steps(2.0, 2000);
    let path = sample_ctmc_path(&a, &mu_bar, 2.0, 43).unwrap();
    let z = sample_observations(&path, &model.observation, &grid, 44).unwrap();
    let traj = run_wonham(&model, &z, &mu_bar, &WonhamOptions::default()).unwrap();
    let exact = pathwise_beta(&traj, &a, BetaKind::ExactRayleigh);
    let min_row = pathwise_beta(&traj, &a, BetaKind::MinRow);
    assert!(!exact.is_degenerate());
    for k in 0..grid.n_points() {
        assert!(
            exact.values()[k] >= constants.min_column_sum - 1e-9,
            "k={k}: {} < min column sum {}",
            exact.values()[k],
            constants.min_column_sum
        );
        assert!(
            exact.values()[k] >= min_row.values()[k] - 1e-9,
            "k={k}: exact {} < min-row {}",
            exact.values()[k],
            min_row.values()[k]
        );
    }
}

#[test]
fn min_row_beta_vanishes_on_the_cycle() {
    let a = Generator::cycle(4, 1.0).unwrap();
    let uniform = ProbabilityVector::uniform(4);
    let grid = TimeGrid::with_steps(1.0, 10);
    let traj = kolmogorov_forward(&a, &uniform, &grid).unwrap();
    let beta = pathwise_beta(&traj, &a, BetaKind::MinRow);
    assert!(beta.values().iter().all(|&v| v == 0.0));
    assert_eq!(beta.integral(), 0.0);
}

#[test]
fn collapsed_posterior_sets_degenerate_flag() {
    let a = Generator::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
    let grid = TimeGrid::with_steps(1.0, 10);
    let traj = kolmogorov_forward(&a, &ProbabilityVector::dirac(2, 0), &grid).unwrap();
    let beta = pathwise_beta(&traj, &a, BetaKind::ExactRayleigh);
    assert!(beta.is_degenerate());
    assert!(beta.values().iter().all(|v| v.is_infinite()));
}

#[test]
fn min_row_time_average_approaches_invariant_average() {
    // Long-horizon ergodic average against sum_i mu_bar(i) min_{j!=i} A(i,j)
    // = 1/2 * 1 + 1/4 * 1 + 1/4 * 2 = 1.25, with a batch-means error bar.
    let a = three_state();
    let obs = ObservationModel::scalar(vec![1.0, 0.0, 0.0], 1.0).unwrap();
    let model = Model::new(a.clone(), obs).unwrap();
    let mu_bar = a.invariant_measure().unwrap();
    let t_end = 100.0;
    let grid = TimeGrid::from_step(t_end, default_dt(&a)).unwrap();
    let path = sample_ctmc_path(&a, &mu_bar, t_end, 606).unwrap();
    let z = sample_observations(&path, &model.observation, &grid, 607).unwrap();
    let traj = run_wonham(&model, &z, &mu_bar, &WonhamOptions::default()).unwrap();
    let beta = pathwise_beta(&traj, &a, BetaKind::MinRow);

    let n_batches = 10;
    let per = grid.n_steps() / n_batches;
    let dt = grid.dt();
    let mut batch_means = Vec::with_capacity(n_batches);
    for b in 0..n_batches {
        let lo = b * per;
        let sum: f64 = (lo..lo + per).map(|k| beta.values()[k]).sum();
        batch_means.push(sum * dt / (per as f64 * dt));
    }
    let overall = beta.time_average();
    let expected = 1.25;
    let mean_of_batches: f64 = batch_means.iter().sum::<f64>() / n_batches as f64;
    let var: f64 = batch_means
        .iter()
        .map(|m| (m - mean_of_batches) * (m - mean_of_batches))
        .sum::<f64>()
        / (n_batches as f64 - 1.0);
    let se = (var / n_batches as f64).sqrt();
    assert!(
        (overall - expected).abs() <= 3.0 * se,
        "time average {overall} vs {expected} (batch se {se})"
    );
    assert!(se < 0.1, "batch estimator degenerate: se = {se}");
}
