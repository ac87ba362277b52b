use crate::error::{Result, SimError};
use crate::grid::TimeGrid;
use crate::observations::ObservationPath;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use filtstab_core::tolerances::DEFAULT_POSITIVITY_FLOOR;
use filtstab_core::{Generator, Model, ProbabilityVector, StateFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    /// Exact predictor (matrix exponential) followed by an exact Bayes
    /// correction per step. Unconditionally simplex-preserving.
    Splitting,
    /// Euler-Maruyama on the filter SDE; kept for convergence studies.
    Euler,
    /// No observations: Kolmogorov forward evolution only.
    ForwardOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct WonhamOptions {
    pub scheme: SchemeTag,
    /// Posterior entries are clamped below at this value, then renormalized.
    pub floor: f64,
}

impl Default for WonhamOptions {
    fn default() -> Self {
        WonhamOptions { scheme: SchemeTag::Splitting, floor: DEFAULT_POSITIVITY_FLOOR }
    }
}

/// Posterior distributions on a grid; column k of `states` is the filter
/// at grid point k.
#[derive(Debug, Clone)]
pub struct FilterTrajectory {
    states: DMatrix<f64>,
    grid: TimeGrid,
    prior: ProbabilityVector,
    scheme: SchemeTag,
    seed: Option<u64>,
}

impl FilterTrajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn prior(&self) -> &ProbabilityVector {
        &self.prior
    }

    pub fn scheme(&self) -> SchemeTag {
        self.scheme
    }

    /// Seed of the observation path the filter consumed, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.states.nrows()
    }

    pub fn n_points(&self) -> usize {
        self.states.ncols()
    }

    /// Raw d x n_points matrix of posteriors.
    pub fn states(&self) -> &DMatrix<f64> {
        &self.states
    }

    pub fn prob(&self, k: usize, x: usize) -> f64 {
        self.states[(x, k)]
    }

    pub fn point_slice(&self, k: usize) -> &[f64] {
        &self.states.as_slice()[k * self.dim()..(k + 1) * self.dim()]
    }

    pub fn to_probability(&self, k: usize) -> Result<ProbabilityVector> {
        Ok(ProbabilityVector::new(self.point_slice(k).to_vec())?)
    }

    pub fn terminal(&self) -> Result<ProbabilityVector> {
        self.to_probability(self.n_points() - 1)
    }

    pub fn expectation(&self, k: usize, f: &StateFunction) -> f64 {
        self.point_slice(k)
            .iter()
            .zip(f.as_slice())
            .map(|(&p, &v)| p * v)
            .sum()
    }
}

/// Precomputed per-step quantities shared by every trial on the same model
/// and grid: predictor matrix, R^{-1}-weighted levels, and the quadratic
/// likelihood offsets.
pub struct WonhamStepper {
    predictor: DMatrix<f64>,
    /// H R^{-1}, d x m.
    gain: DMatrix<f64>,
    /// (1/2) h(x)^T R^{-1} h(x) per state.
    quad: DVector<f64>,
    dt: f64,
    dim: usize,
}

impl WonhamStepper {
    pub fn new(model: &Model, dt: f64) -> Self {
        let a = &model.generator;
        let obs = &model.observation;
        let predictor = (a.rates().transpose() * dt).exp();
        let gain = obs.h() * obs.r_inv();
        let quad = DVector::from_fn(a.dim(), |x, _| {
            0.5 * (gain.row(x) * obs.h().row(x).transpose())[(0, 0)]
        });
        WonhamStepper { predictor, gain, quad, dt, dim: a.dim() }
    }

    /// One splitting step in place. `scratch` must have length d.
    fn step_splitting(&self, cur: &mut DVector<f64>, dz: &[f64], scratch: &mut DVector<f64>) {
        scratch.gemv(1.0, &self.predictor, cur, 0.0);
        // Bayes weights in the log domain, max-subtracted before exp.
        let mut max_lw = f64::NEG_INFINITY;
        for x in 0..self.dim {
            let mut lw = -self.quad[x] * self.dt;
            for (c, &z) in dz.iter().enumerate() {
                lw += self.gain[(x, c)] * z;
            }
            cur[x] = lw;
            max_lw = max_lw.max(lw);
        }
        for x in 0..self.dim {
            cur[x] = scratch[x] * (cur[x] - max_lw).exp();
        }
    }

}

fn floor_and_normalize(cur: &mut DVector<f64>, floor: f64, step: usize) -> Result<()> {
    let mut sum = 0.0;
    for v in cur.iter_mut() {
        if !v.is_finite() {
            return Err(SimError::Underflow { step });
        }
        if *v < floor {
            *v = floor;
        }
        sum += *v;
    }
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(SimError::Underflow { step });
    }
    *cur /= sum;
    Ok(())
}

/// Integrate the filter along one observation path.
pub fn run_wonham(
    model: &Model,
    z: &ObservationPath,
    pi0: &ProbabilityVector,
    opts: &WonhamOptions,
) -> Result<FilterTrajectory> {
    if pi0.dim() != model.dim() {
        return Err(SimError::Dimension(format!(
            "prior has {} states, model {}",
            pi0.dim(),
            model.dim()
        )));
    }
    if z.channels() != model.observation.channels() {
        return Err(SimError::Dimension(format!(
            "observation path has {} channels, model {}",
            z.channels(),
            model.observation.channels()
        )));
    }
    let grid = z.grid().clone();
    let d = model.dim();
    let stepper = WonhamStepper::new(model, grid.dt());
    let mut states = DMatrix::<f64>::zeros(d, grid.n_points());
    let mut cur = DVector::<f64>::from_column_slice(pi0.as_slice());
    let mut scratch = DVector::<f64>::zeros(d);
    states.column_mut(0).copy_from(&cur);
    for k in 0..grid.n_steps() {
        let dz = z.increment(k);
        match opts.scheme {
            SchemeTag::Splitting => {
                stepper.step_splitting(&mut cur, dz.as_slice(), &mut scratch)
            }
            SchemeTag::Euler => {
                euler_step(model, grid.dt(), &mut cur, dz.as_slice(), &mut scratch)
            }
            SchemeTag::ForwardOnly => {
                return Err(SimError::Grid(
                    "forward-only evolution takes no observations; call kolmogorov_forward".into(),
                ))
            }
        }
        floor_and_normalize(&mut cur, opts.floor, k)?;
        states.column_mut(k + 1).copy_from(&cur);
    }
    Ok(FilterTrajectory {
        states,
        grid,
        prior: pi0.clone(),
        scheme: opts.scheme,
        seed: Some(z.seed()),
    })
}

/// One Euler-Maruyama step on the filter SDE. Preserves the total mass
/// exactly but not positivity; the caller floors afterwards.
fn euler_step(
    model: &Model,
    dt: f64,
    cur: &mut DVector<f64>,
    dz: &[f64],
    scratch: &mut DVector<f64>,
) {
    let a = &model.generator;
    let h = model.observation.h();
    let m = model.observation.channels();
    let mut pi_h = DVector::<f64>::zeros(m);
    for c in 0..m {
        let mut s = 0.0;
        for x in 0..cur.len() {
            s += cur[x] * h[(x, c)];
        }
        pi_h[c] = s;
    }
    let mut innov = DVector::<f64>::zeros(m);
    for c in 0..m {
        innov[c] = dz[c] - pi_h[c] * dt;
    }
    let weighted = model.observation.r_inv() * &innov;
    for x in 0..cur.len() {
        let mut drift = 0.0;
        for y in 0..cur.len() {
            drift += a.rate(y, x) * cur[y];
        }
        let mut corr = 0.0;
        for c in 0..m {
            corr += (h[(x, c)] - pi_h[c]) * weighted[c];
        }
        scratch[x] = cur[x] + drift * dt + cur[x] * corr;
    }
    cur.copy_from(scratch);
}

/// Observation-free marginal evolution: one matrix exponential per step
/// applied to the running law.
pub fn kolmogorov_forward(a: &Generator, mu0: &ProbabilityVector, grid: &TimeGrid) -> Result<FilterTrajectory> {
    if mu0.dim() != a.dim() {
        return Err(SimError::Dimension(format!(
            "initial law has {} states, generator {}",
            mu0.dim(),
            a.dim()
        )));
    }
    let d = a.dim();
    let predictor = (a.rates().transpose() * grid.dt()).exp();
    let mut states = DMatrix::<f64>::zeros(d, grid.n_points());
    let mut cur = DVector::<f64>::from_column_slice(mu0.as_slice());
    let mut scratch = DVector::<f64>::zeros(d);
    states.column_mut(0).copy_from(&cur);
    for k in 0..grid.n_steps() {
        scratch.gemv(1.0, &predictor, &cur, 0.0);
        let sum: f64 = scratch.iter().sum();
        scratch.scale_mut(1.0 / sum);
        cur.copy_from(&scratch);
        states.column_mut(k + 1).copy_from(&cur);
    }
    Ok(FilterTrajectory {
        states,
        grid: grid.clone(),
        prior: mu0.clone(),
        scheme: SchemeTag::ForwardOnly,
        seed: None,
    })
}
