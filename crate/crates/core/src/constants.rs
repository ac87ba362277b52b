//! Poincare-type constants of a generator.
//!
//! Two families are computed. The spectral constant `standard_c0` is the
//! best constant in `energy(mu, f) >= c * variance(mu, f)` over functions
//! `f`, with `mu` the invariant measure. The remaining constants are
//! closed-form rate functionals that, when strictly positive, certify the
//! stronger conditional inequality `energy(pi, f) >= c * variance(pi, f)`
//! uniformly over probability vectors `pi`:
//!
//! * `min_column_sum`      `sum_j min_{i != j} A(i, j)`
//! * `geometric_mean_min`  `min_{i != j} sqrt(A(i, j) A(j, i))`
//! * `doeblin`             `max_{j*} min_{x != j*} A(x, j*)`
//! * `min_row_average`     `sum_i mu(i) min_{j != i} A(i, j)`
//!
//! All four vanish on the one-directional cycle, which admits no uniform
//! conditional constant at all.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::Result;
use crate::generator::Generator;
use crate::probability::ProbabilityVector;
use crate::tolerances::SPECTRAL_GAP_DEGENERACY_TOL;

/// The constants bundle for one generator. Raw values are reported even when
/// zero or negative-degenerate; [`PiConstants::best_conditional`] selects a
/// single certifying constant when one exists.
#[derive(Debug, Clone, Serialize)]
pub struct PiConstants {
    pub standard_c0: f64,
    pub min_column_sum: f64,
    pub geometric_mean_min: f64,
    pub doeblin: f64,
    pub min_row_average: f64,
}

impl PiConstants {
    /// Computes every constant; requires an irreducible generator (the
    /// invariant measure weights both `standard_c0` and `min_row_average`).
    pub fn compute(a: &Generator) -> Result<Self> {
        let mu = a.invariant_measure()?;
        Ok(Self {
            standard_c0: standard_pi_constant(a, &mu),
            min_column_sum: min_column_sum(a),
            geometric_mean_min: geometric_mean_min(a),
            doeblin: doeblin_constant(a),
            min_row_average: min_row_average(a, &mu),
        })
    }

    /// The conditional-family constants, labeled.
    pub fn conditional_values(&self) -> [(&'static str, f64); 4] {
        [
            ("min_column_sum", self.min_column_sum),
            ("geometric_mean_min", self.geometric_mean_min),
            ("doeblin", self.doeblin),
            ("min_row_average", self.min_row_average),
        ]
    }

    /// Largest strictly positive conditional constant, if any. This is the
    /// single rate `c` quoted by downstream decay bounds.
    pub fn best_conditional(&self) -> Option<f64> {
        self.conditional_values()
            .iter()
            .map(|&(_, v)| v)
            .filter(|v| *v > 0.0)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    pub fn certifies_conditional_pi(&self) -> bool {
        self.best_conditional().is_some()
    }
}

/// Convenience wrapper over [`PiConstants::compute`].
pub fn conditional_pi_constants(a: &Generator) -> Result<PiConstants> {
    PiConstants::compute(a)
}

/// `sum_j min_{i != j} A(i, j)`.
pub fn min_column_sum(a: &Generator) -> f64 {
    let n = a.dim();
    (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| i != j)
                .map(|i| a.rate(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|m| m.is_finite())
        .sum()
}

/// `min_{i != j} sqrt(A(i, j) A(j, i))`.
pub fn geometric_mean_min(a: &Generator) -> f64 {
    let n = a.dim();
    let mut m = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.min((a.rate(i, j) * a.rate(j, i)).sqrt());
        }
    }
    if m.is_finite() {
        m
    } else {
        0.0
    }
}

/// `max_{j*} min_{x != j*} A(x, j*)`: the largest rate at which every other
/// state jumps into some common target state.
pub fn doeblin_constant(a: &Generator) -> f64 {
    let n = a.dim();
    (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| i != j)
                .map(|i| a.rate(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|m| m.is_finite())
        .fold(0.0, f64::max)
}

/// `sum_i mu(i) min_{j != i} A(i, j)`.
pub fn min_row_average(a: &Generator, mu: &ProbabilityVector) -> f64 {
    assert_eq!(a.dim(), mu.dim(), "dimension mismatch in min-row average");
    let mins = a.row_min_offdiagonal();
    mu.as_vector().dot(&mins)
}

/// Best constant in `energy(w, f) >= c * variance(w, f)`, i.e. the smallest
/// generalized eigenvalue of the energy form against the centered covariance
/// form `diag(w) - w w^T`, restricted off constant functions.
///
/// Returns `+inf` when the variance form vanishes identically (fewer than
/// two states carry weight). Weights are expected strictly positive; zero
/// entries are lifted to a tiny floor, which reproduces the limiting value
/// of the eigenvalue problem at reduced accuracy.
pub fn rayleigh_constant(weights: &[f64], a: &Generator) -> f64 {
    let n = a.dim();
    assert_eq!(weights.len(), n, "dimension mismatch in Rayleigh constant");
    if weights.iter().filter(|&&w| w > 0.0).count() <= 1 {
        return f64::INFINITY;
    }
    let max_w = weights.iter().cloned().fold(0.0, f64::max);
    let floor = max_w * 1e-14;
    let w: Vec<f64> = weights.iter().map(|&x| x.max(floor)).collect();

    // Symmetrized edge weights s(i,j) = w(i) A(i,j) + w(j) A(j,i) turn the
    // energy into the Laplacian quadratic form f^T L f. Whitening by
    // D^{-1/2}, D = diag(w), sends the covariance form to the projection
    // orthogonal to q = D^{1/2} 1, which spans the kernel of the whitened
    // Laplacian; the target constant is its second-smallest eigenvalue.
    let mut l: DMatrix<f64> = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let s = w[i] * a.rate(i, j) + w[j] * a.rate(j, i);
            l[(i, j)] -= s;
            l[(j, i)] -= s;
            l[(i, i)] += s;
            l[(j, j)] += s;
        }
    }
    let inv_sqrt = DVector::from_iterator(n, w.iter().map(|&x| 1.0 / x.sqrt()));
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let mut eigs: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().cloned().collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigs[1].max(0.0)
}

/// Spectral-gap constant of the standard Poincare inequality under `mu`.
/// Values below [`SPECTRAL_GAP_DEGENERACY_TOL`] collapse to exactly zero:
/// the generator then fails to certify a standard inequality (e.g. it is
/// reducible and `mu` mixes disconnected blocks).
pub fn standard_pi_constant(a: &Generator, mu: &ProbabilityVector) -> f64 {
    let c = rayleigh_constant(mu.as_slice(), a);
    if c.is_finite() && c > SPECTRAL_GAP_DEGENERACY_TOL {
        c
    } else if c.is_infinite() {
        c
    } else {
        0.0
    }
}
