use crate::grid::TimeGrid;
use crate::wonham::FilterTrajectory;
use serde::Serialize;
use filtstab_core::stats::trapezoid_uniform;
use filtstab_core::{rayleigh_constant, Generator};

/// How the pathwise decay-rate process is evaluated at each posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaKind {
    /// sum_i pi(i) min_{j != i} rates(i, j) — closed form, always finite.
    MinRow,
    /// Smallest Rayleigh quotient of the pi-weighted energy form over the
    /// pi-weighted variance form; +inf when pi has fewer than two positive
    /// entries (the variance form vanishes identically).
    ExactRayleigh,
}

/// Decay-rate process along one filter trajectory.
#[derive(Debug, Clone)]
pub struct BetaPath {
    values: Vec<f64>,
    grid: TimeGrid,
    kind: BetaKind,
    degenerate: bool,
}

pub fn pathwise_beta(traj: &FilterTrajectory, a: &Generator, kind: BetaKind) -> BetaPath {
    let n = traj.n_points();
    let mut values = Vec::with_capacity(n);
    let mut degenerate = false;
    match kind {
        BetaKind::MinRow => {
            let mins = a.row_min_offdiagonal();
            for k in 0..n {
                let pi = traj.point_slice(k);
                values.push(pi.iter().zip(mins.iter()).map(|(&p, &m)| p * m).sum());
            }
        }
        BetaKind::ExactRayleigh => {
            for k in 0..n {
                let v = rayleigh_constant(traj.point_slice(k), a);
                if !v.is_finite() {
                    degenerate = true;
                }
                values.push(v);
            }
        }
    }
    BetaPath { values, grid: traj.grid().clone(), kind, degenerate }
}

impl BetaPath {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kind(&self) -> BetaKind {
        self.kind
    }

    /// True when some posterior collapsed onto a single state and the
    /// Rayleigh quotient returned its +inf sentinel.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Trapezoid quadrature of beta over [0, t_end].
    pub fn integral(&self) -> f64 {
        trapezoid_uniform(&self.values, self.grid.dt())
    }

    pub fn time_average(&self) -> f64 {
        self.integral() / self.grid.t_end()
    }
}
