//! Probability vectors on a finite state space and real-valued state functions.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::tolerances::PROB_SUM_TOL;

/// A probability distribution on `{0, .., dim-1}`.
///
/// Entries must be finite, nonnegative, and sum to one within
/// [`PROB_SUM_TOL`]. The sum is not repaired on construction; callers that
/// renormalize (e.g. filter steps) do so explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector {
    p: DVector<f64>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(entries))
    }

    pub fn from_vector(p: DVector<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(CoreError::Probability("empty vector".into()));
        }
        for (i, &x) in p.iter().enumerate() {
            if !x.is_finite() {
                return Err(CoreError::Probability(format!(
                    "entry {i} is not finite ({x})"
                )));
            }
            if x < 0.0 {
                return Err(CoreError::Probability(format!(
                    "entry {i} is negative ({x})"
                )));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(CoreError::Probability(format!(
                "entries sum to {sum}, not 1 within {PROB_SUM_TOL:e}"
            )));
        }
        Ok(Self { p })
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            p: DVector::from_element(dim, 1.0 / dim as f64),
        }
    }

    /// Point mass at `state`.
    pub fn dirac(dim: usize, state: usize) -> Self {
        assert!(state < dim, "dirac state {state} out of range {dim}");
        let mut p = DVector::zeros(dim);
        p[state] = 1.0;
        Self { p }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.p
    }

    pub fn as_slice(&self) -> &[f64] {
        self.p.as_slice()
    }

    /// All entries strictly above `floor` (pass `0.0` for plain positivity).
    pub fn is_positive(&self, floor: f64) -> bool {
        self.p.iter().all(|&x| x > floor)
    }

    /// Expectation of `f` under this distribution.
    pub fn expect(&self, f: &StateFunction) -> f64 {
        assert_eq!(self.dim(), f.dim(), "dimension mismatch in expectation");
        self.p.dot(f.as_vector())
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = CoreError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Vec<f64> {
        p.p.as_slice().to_vec()
    }
}

/// A real-valued function on the state space, stored as its value vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StateFunction {
    values: DVector<f64>,
}

impl StateFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(values))
    }

    pub fn from_vector(values: DVector<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(CoreError::Function("empty value vector".into()));
        }
        if let Some((i, &x)) = values.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(CoreError::Function(format!(
                "value {i} is not finite ({x})"
            )));
        }
        Ok(Self { values })
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self {
            values: DVector::from_element(dim, value),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }
}

impl TryFrom<Vec<f64>> for StateFunction {
    type Error = CoreError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<StateFunction> for Vec<f64> {
    fn from(f: StateFunction) -> Vec<f64> {
        f.values.as_slice().to_vec()
    }
}

/// Pointwise likelihood ratio `num(x) / den(x)` of two distributions.
///
/// Errors on any state where `den` vanishes (or is negative); filters keep
/// their output above a positivity floor precisely so this stays defined.
pub fn density_ratio(num: &[f64], den: &[f64]) -> Result<Vec<f64>> {
    if num.len() != den.len() {
        return Err(CoreError::Dimension(format!(
            "ratio of length-{} and length-{} vectors",
            num.len(),
            den.len()
        )));
    }
    num.iter()
        .zip(den)
        .enumerate()
        .map(|(i, (&n, &d))| {
            if d <= 0.0 {
                Err(CoreError::Numerical(format!(
                    "zero denominator at state {i}: density ratio undefined; \
                     keep filter outputs above the positivity floor"
                )))
            } else {
                Ok(n / d)
            }
        })
        .collect()
}

/// `min_x num(x) / den(x)` over the support of `den`.
pub fn min_density_ratio(num: &ProbabilityVector, den: &ProbabilityVector) -> f64 {
    assert_eq!(num.dim(), den.dim(), "dimension mismatch in density ratio");
    let mut m = f64::INFINITY;
    for i in 0..num.dim() {
        if den.get(i) > 0.0 {
            m = m.min(num.get(i) / den.get(i));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sum() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn rejects_negative_entry() {
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn sum_tolerance_is_tight() {
        // 1e-13 off is accepted, 1e-11 off is not.
        assert!(ProbabilityVector::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.5 + 1e-11]).is_err());
    }

    #[test]
    fn positivity_floor_predicate() {
        let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        assert!(p.is_positive(0.0));
        assert!(p.is_positive(0.2));
        assert!(!p.is_positive(0.3));
        let q = ProbabilityVector::dirac(3, 1);
        assert!(!q.is_positive(0.0));
    }

    #[test]
    fn density_ratio_matches_hand_value() {
        let g = density_ratio(&[0.8, 0.2], &[0.5, 0.5]).unwrap();
        assert_eq!(g, vec![1.6, 0.4]);
    }

    #[test]
    fn density_ratio_zero_denominator_is_an_error() {
        let err = density_ratio(&[0.8, 0.2], &[1.0, 0.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("positivity floor"), "got: {msg}");
    }

    #[test]
    fn state_function_rejects_nan() {
        assert!(StateFunction::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let p = ProbabilityVector::new(vec![0.25, 0.75]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: ProbabilityVector = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
