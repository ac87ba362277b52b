use crate::error::{Result, SimError};
use crate::grid::TimeGrid;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use filtstab_core::{Generator, ProbabilityVector};

/// Right-continuous piecewise-constant signal path on [0, horizon].
/// `states_after[k]` is the state entered at `jump_times[k]`.
#[derive(Debug, Clone)]
pub struct CtmcPath {
    initial_state: usize,
    jump_times: Vec<f64>,
    states_after: Vec<usize>,
    horizon: f64,
    /// Set when the path entered a state with zero exit rate and stayed.
    absorbed_at: Option<f64>,
}

/// Inverse-CDF draw from a probability vector using a single uniform.
/// Shared uniforms across ensembles couple the draws monotonically.
pub fn sample_state(p: &ProbabilityVector, u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in p.as_slice().iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    p.dim() - 1
}

/// Exact event-driven sampling: exponential holding times with the exit
/// rate, jump target from the normalized off-diagonal row.
pub fn sample_ctmc_path(
    a: &Generator,
    mu0: &ProbabilityVector,
    horizon: f64,
    seed: u64,
) -> Result<CtmcPath> {
    if mu0.dim() != a.dim() {
        return Err(SimError::Dimension(format!(
            "initial law has {} states, generator {}",
            mu0.dim(),
            a.dim()
        )));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(SimError::Grid(format!("horizon must be positive, got {horizon}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = sample_state(mu0, rng.random::<f64>());
    let initial_state = state;
    let mut t = 0.0;
    let mut jump_times = Vec::new();
    let mut states_after = Vec::new();
    let mut absorbed_at = None;
    loop {
        let exit = a.exit_rate(state);
        if exit <= 0.0 {
            absorbed_at = Some(t);
            break;
        }
        // Exponential(exit) via inversion; 1 - u avoids ln(0).
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / exit;
        if t >= horizon {
            break;
        }
        let mut target = rng.random::<f64>() * exit;
        let mut next = usize::MAX;
        for j in 0..a.dim() {
            if j != state {
                target -= a.rate(state, j);
                if target < 0.0 {
                    next = j;
                    break;
                }
            }
        }
        if next == usize::MAX {
            // Rounding pushed the target past the last positive rate.
            next = (0..a.dim())
                .rev()
                .find(|&j| j != state && a.rate(state, j) > 0.0)
                .expect("positive exit rate implies a positive off-diagonal entry");
        }
        jump_times.push(t);
        states_after.push(next);
        state = next;
    }
    Ok(CtmcPath { initial_state, jump_times, states_after, horizon, absorbed_at })
}

impl CtmcPath {
    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_jumps(&self) -> usize {
        self.jump_times.len()
    }

    pub fn absorbed_at(&self) -> Option<f64> {
        self.absorbed_at
    }

    pub fn state_at(&self, t: f64) -> usize {
        let k = self.jump_times.partition_point(|&s| s <= t);
        if k == 0 {
            self.initial_state
        } else {
            self.states_after[k - 1]
        }
    }

    /// States at every grid point in one forward sweep.
    pub fn states_on_grid(&self, grid: &TimeGrid) -> Vec<usize> {
        let mut out = Vec::with_capacity(grid.n_points());
        let mut state = self.initial_state;
        let mut next_jump = 0;
        for t in grid.times() {
            while next_jump < self.jump_times.len() && self.jump_times[next_jump] <= t {
                state = self.states_after[next_jump];
                next_jump += 1;
            }
            out.push(state);
        }
        out
    }

    /// Fraction of [0, horizon] spent in each state.
    pub fn occupation_fractions(&self, dim: usize) -> Vec<f64> {
        let mut occ = vec![0.0; dim];
        let mut state = self.initial_state;
        let mut last = 0.0;
        for (k, &t) in self.jump_times.iter().enumerate() {
            occ[state] += t - last;
            last = t;
            state = self.states_after[k];
        }
        occ[state] += self.horizon - last;
        for v in &mut occ {
            *v /= self.horizon;
        }
        occ
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> Generator {
        Generator::two_state(1.0, 2.0).unwrap()
    }

    #[test]
    fn same_seed_same_path() {
        let a = two_state();
        let mu = ProbabilityVector::uniform(2);
        let p1 = sample_ctmc_path(&a, &mu, 10.0, 99).unwrap();
        let p2 = sample_ctmc_path(&a, &mu, 10.0, 99).unwrap();
        assert_eq!(p1.initial_state(), p2.initial_state());
        assert_eq!(p1.jump_times, p2.jump_times);
        assert_eq!(p1.states_after, p2.states_after);
    }

    #[test]
    fn single_state_chain_never_jumps() {
        let a = Generator::from_rows(&[vec![0.0]]).unwrap();
        let p = sample_ctmc_path(&a, &ProbabilityVector::uniform(1), 5.0, 1).unwrap();
        assert_eq!(p.n_jumps(), 0);
        assert_eq!(p.absorbed_at(), Some(0.0));
        assert_eq!(p.state_at(3.0), 0);
    }

    #[test]
    fn consecutive_states_differ_and_times_increase() {
        let a = two_state();
        let p = sample_ctmc_path(&a, &ProbabilityVector::uniform(2), 50.0, 3).unwrap();
        assert!(p.n_jumps() > 10);
        let mut prev_state = p.initial_state();
        let mut prev_t = 0.0;
        for (k, &t) in p.jump_times.iter().enumerate() {
            assert!(t > prev_t);
            assert_ne!(p.states_after[k], prev_state);
            prev_t = t;
            prev_state = p.states_after[k];
        }
    }

    #[test]
    fn grid_states_match_pointwise_lookup() {
        let a = two_state();
        let p = sample_ctmc_path(&a, &ProbabilityVector::uniform(2), 10.0, 17).unwrap();
        let grid = TimeGrid::with_steps(10.0, 997);
        let fast = p.states_on_grid(&grid);
        for (k, t) in grid.times().enumerate() {
            assert_eq!(fast[k], p.state_at(t), "mismatch at grid point {k}");
        }
    }

    #[test]
    fn occupation_fractions_sum_to_one() {
        let a = two_state();
        let p = sample_ctmc_path(&a, &ProbabilityVector::uniform(2), 25.0, 5).unwrap();
        let occ = p.occupation_fractions(2);
        assert!((occ.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(occ.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn dirac_start_is_respected() {
        let a = two_state();
        let p = sample_ctmc_path(&a, &ProbabilityVector::dirac(2, 1), 1.0, 11).unwrap();
        assert_eq!(p.initial_state(), 1);
    }
}
