use crate::error::{Result, SimError};
use crate::observations::ObservationPath;
use crate::wonham::FilterTrajectory;
use nalgebra::DVector;
use filtstab_core::{density_ratio, ObservationModel, ProbabilityVector, StateFunction};

/// Entrywise posterior ratio. Well-defined whenever the denominator filter
/// respects the positivity floor.
pub fn likelihood_ratio(
    pi_mu: &ProbabilityVector,
    pi_mubar: &ProbabilityVector,
) -> Result<StateFunction> {
    Ok(StateFunction::new(density_ratio(pi_mu.as_slice(), pi_mubar.as_slice())?)?)
}

/// Ratio of two filter trajectories at grid point k.
pub fn likelihood_ratio_at(
    traj_mu: &FilterTrajectory,
    traj_mubar: &FilterTrajectory,
    k: usize,
) -> Result<StateFunction> {
    let num = traj_mu.point_slice(k);
    let den = traj_mubar.point_slice(k);
    let mut values = Vec::with_capacity(num.len());
    for (x, (&p, &q)) in num.iter().zip(den).enumerate() {
        if q <= 0.0 {
            return Err(filtstab_core::CoreError::Probability(format!(
                "zero denominator at state {x}: density ratio undefined; \
                 keep filter outputs above the positivity floor"
            ))
            .into());
        }
        values.push(p / q);
    }
    Ok(StateFunction::new(values)?)
}

/// Which quadratic form weights the innovations in the change-of-measure
/// exponent. `InverseCovariance` makes the Doleans exponential a martingale
/// for any SPD R; `Unweighted` reproduces the unit-covariance convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseWeighting {
    InverseCovariance,
    Unweighted,
}

/// Doleans exponential of the innovations gap between two filters sharing
/// one observation record:
///
///   log A accumulates D_k^T W (dZ_k - pi^mubar_k(h) dt) - (1/2) D_k^T W D_k dt
///
/// with D_k = pi^mu_k(h) - pi^mubar_k(h) at the left endpoint and W the
/// selected weighting. Returns A at every grid point, A_0 = 1.
pub fn exponential_martingale(
    traj_mu: &FilterTrajectory,
    traj_mubar: &FilterTrajectory,
    obs: &ObservationModel,
    z: &ObservationPath,
    weighting: NoiseWeighting,
) -> Result<Vec<f64>> {
    if traj_mu.grid() != z.grid() || traj_mubar.grid() != z.grid() {
        return Err(SimError::Grid(
            "exponential martingale requires both filters on the observation grid".into(),
        ));
    }
    if traj_mu.dim() != obs.dim() || traj_mubar.dim() != obs.dim() {
        return Err(SimError::Dimension(format!(
            "filters have {} / {} states, observation model {}",
            traj_mu.dim(),
            traj_mubar.dim(),
            obs.dim()
        )));
    }
    let grid = z.grid();
    let dt = grid.dt();
    let m = obs.channels();
    let h = obs.h();
    let mut out = Vec::with_capacity(grid.n_points());
    out.push(1.0);
    let mut log_a = 0.0;
    let mut d_raw = DVector::<f64>::zeros(m);
    let mut mean_bar = DVector::<f64>::zeros(m);
    for k in 0..grid.n_steps() {
        let p_mu = traj_mu.point_slice(k);
        let p_bar = traj_mubar.point_slice(k);
        for c in 0..m {
            let mut mu_h = 0.0;
            let mut bar_h = 0.0;
            for x in 0..obs.dim() {
                mu_h += p_mu[x] * h[(x, c)];
                bar_h += p_bar[x] * h[(x, c)];
            }
            d_raw[c] = mu_h - bar_h;
            mean_bar[c] = bar_h;
        }
        let weighted = match weighting {
            NoiseWeighting::InverseCovariance => obs.r_inv() * &d_raw,
            NoiseWeighting::Unweighted => d_raw.clone(),
        };
        let dz = z.increment(k);
        let mut incr = 0.0;
        let mut quad = 0.0;
        for c in 0..m {
            incr += weighted[c] * (dz[c] - mean_bar[c] * dt);
            quad += weighted[c] * d_raw[c];
        }
        log_a += incr - 0.5 * quad * dt;
        out.push(log_a.exp());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use filtstab_core::ProbabilityVector;

    #[test]
    fn ratio_matches_hand_value() {
        let num = ProbabilityVector::new(vec![0.8, 0.2]).unwrap();
        let den = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let g = likelihood_ratio(&num, &den).unwrap();
        assert_eq!(g.as_slice(), &[1.6, 0.4]);
    }

    #[test]
    fn equal_posteriors_give_unit_ratio() {
        let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let g = likelihood_ratio(&p, &p).unwrap();
        assert!(g.as_slice().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }
}
