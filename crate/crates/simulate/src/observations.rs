use crate::ctmc::CtmcPath;
use crate::error::{Result, SimError};
use crate::grid::TimeGrid;
use nalgebra::{DMatrix, DVector, DVectorView};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use filtstab_core::ObservationModel;

/// Integrated observation increments on a uniform grid: column k holds
/// dZ_k = h(X at left endpoint of step k) dt + sqrt(dt) R^{1/2} xi_k.
#[derive(Debug, Clone)]
pub struct ObservationPath {
    increments: DMatrix<f64>,
    grid: TimeGrid,
    seed: u64,
}

pub fn sample_observations(
    path: &CtmcPath,
    obs: &ObservationModel,
    grid: &TimeGrid,
    seed: u64,
) -> Result<ObservationPath> {
    if grid.t_end() > path.horizon() + 1e-12 {
        return Err(SimError::Grid(format!(
            "grid horizon {} exceeds signal horizon {}",
            grid.t_end(),
            path.horizon()
        )));
    }
    let m = obs.channels();
    let dt = grid.dt();
    let sqrt_dt = dt.sqrt();
    let states = path.states_on_grid(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut increments = DMatrix::<f64>::zeros(m, grid.n_steps());
    let mut xi = DVector::<f64>::zeros(m);
    for k in 0..grid.n_steps() {
        for c in 0..m {
            xi[c] = StandardNormal.sample(&mut rng);
        }
        let noise = obs.r_sqrt() * &xi;
        let level = obs.h().row(states[k]);
        for c in 0..m {
            increments[(c, k)] = level[c] * dt + sqrt_dt * noise[c];
        }
    }
    Ok(ObservationPath { increments, grid: grid.clone(), seed })
}

impl ObservationPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn channels(&self) -> usize {
        self.increments.nrows()
    }

    pub fn increment(&self, k: usize) -> DVectorView<'_, f64> {
        self.increments.column(k)
    }

    /// Re-bin increments onto a grid `factor` times coarser by summing
    /// blocks — the same Brownian path seen at lower resolution, which is
    /// what a step-size refinement study needs.
    pub fn coarsen(&self, factor: usize) -> Result<ObservationPath> {
        let grid = self.grid.coarsen(factor)?;
        let m = self.channels();
        let mut increments = DMatrix::<f64>::zeros(m, grid.n_steps());
        for k in 0..grid.n_steps() {
            for j in 0..factor {
                for c in 0..m {
                    increments[(c, k)] += self.increments[(c, k * factor + j)];
                }
            }
        }
        Ok(ObservationPath { increments, grid, seed: self.seed })
    }
}
