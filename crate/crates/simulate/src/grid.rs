use crate::error::{Result, SimError};
use filtstab_core::Generator;
use serde::Serialize;

/// Uniform grid on [0, t_end] with n_steps intervals. The stored step is
/// recomputed as t_end / n_steps so that the last grid point is exactly
/// t_end regardless of how the requested step rounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
    dt: f64,
}

impl TimeGrid {
    /// Grid from a requested step; the step must divide the horizon within
    /// relative 1e-6.
    pub fn from_step(t_end: f64, dt: f64) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(SimError::Grid(format!("horizon must be positive, got {t_end}")));
        }
        if !(dt > 0.0) || dt > t_end {
            return Err(SimError::Grid(format!("step {dt} outside (0, {t_end}]")));
        }
        let ratio = t_end / dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-6 * ratio {
            return Err(SimError::Grid(format!(
                "step {dt} does not divide horizon {t_end} (t_end/dt = {ratio})"
            )));
        }
        Ok(Self::with_steps(t_end, n as usize))
    }

    pub fn with_steps(t_end: f64, n_steps: usize) -> Self {
        assert!(t_end > 0.0 && n_steps > 0, "degenerate grid");
        TimeGrid { t_end, n_steps, dt: t_end / n_steps as f64 }
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Grid points = steps + 1 (both endpoints included).
    pub fn n_points(&self) -> usize {
        self.n_steps + 1
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points()).map(|k| self.time(k))
    }

    /// Merge `factor` consecutive steps into one; factor must divide n_steps.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.n_steps % factor != 0 {
            return Err(SimError::Grid(format!(
                "coarsening factor {factor} does not divide {} steps",
                self.n_steps
            )));
        }
        Ok(Self::with_steps(self.t_end, self.n_steps / factor))
    }
}

/// Step heuristic: resolve the fastest exit rate by three decades, so the
/// one-step Bayes/predictor splitting stays well inside its asymptotic
/// first-order regime. Falls back to 1e-3 for a jump-free generator.
pub fn default_dt(a: &Generator) -> f64 {
    let m = a.max_exit_rate();
    if m > 0.0 {
        1e-3 / m
    } else {
        1e-3
    }
}
