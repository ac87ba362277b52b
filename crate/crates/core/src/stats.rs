//! Deterministic reductions for Monte Carlo summaries.
//!
//! Trial values are always reduced in trial order with pairwise summation,
//! so results are bit-identical regardless of how many worker threads
//! produced them.

use serde::Serialize;

/// Pairwise (cascade) sum: O(log n) error growth and a fixed association
/// order independent of scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    /// Two-pass mean and standard error of the mean (pairwise sums).
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "cannot summarize an empty sample");
        let mean = pairwise_sum(values) / n as f64;
        if n == 1 {
            return Self { mean, se: 0.0, n };
        }
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&sq) / (n as f64 - 1.0);
        Self {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        }
    }

    /// Mean of elementwise differences `a - b` (paired samples).
    pub fn from_paired_diff(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples must align");
        let d: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        Self::from_samples(&d)
    }
}

/// Sample covariance of paired samples (used by ratio delta methods).
pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "paired samples must align");
    let n = a.len();
    assert!(n > 1, "covariance needs at least two pairs");
    let ma = pairwise_sum(a) / n as f64;
    let mb = pairwise_sum(b) / n as f64;
    let prods: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x - ma) * (y - mb))
        .collect();
    pairwise_sum(&prods) / (n as f64 - 1.0)
}

/// Trapezoid rule on a uniform grid of spacing `dt`.
pub fn trapezoid_uniform(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let interior = pairwise_sum(&values[1..n - 1]);
    dt * (0.5 * (values[0] + values[n - 1]) + interior)
}
