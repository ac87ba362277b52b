//! Quadratic forms attached to a generator: carre du champ, energy, and
//! variance under a weighting measure.
//!
//! For a generator `A` and function `f`,
//!
//! ```text
//! Gamma(f)(x) = sum_j A(x, j) (f(x) - f(j))^2
//! ```
//!
//! and for a probability vector `w`,
//!
//! ```text
//! energy(w, f)   = sum_x w(x) Gamma(f)(x)
//! variance(w, f) = sum_x w(x) (f(x) - w(f))^2
//! ```
//!
//! With `w` the invariant measure these are the ingredients of the standard
//! Poincare inequality `energy >= c * variance`; with `w` a conditional
//! (posterior) distribution they are the conditional energy and variance
//! used by the filter-side inequalities.

use crate::generator::Generator;
use crate::probability::{ProbabilityVector, StateFunction};

/// Pointwise carre du champ `Gamma(f)`.
pub fn carre_du_champ(a: &Generator, f: &StateFunction) -> StateFunction {
    assert_eq!(a.dim(), f.dim(), "dimension mismatch in carre du champ");
    let fv = f.as_slice();
    let values: Vec<f64> = (0..a.dim())
        .map(|x| {
            let mut s = 0.0;
            for j in 0..a.dim() {
                if j != x {
                    let d = fv[x] - fv[j];
                    s += a.rate(x, j) * d * d;
                }
            }
            s
        })
        .collect();
    StateFunction::new(values).expect("carre du champ of finite inputs is finite")
}

/// `sum_x w(x) Gamma(f)(x)`, the `w`-weighted Dirichlet energy.
pub fn energy(w: &ProbabilityVector, a: &Generator, f: &StateFunction) -> f64 {
    energy_slices(w.as_slice(), a, f.as_slice())
}

/// `sum_x w(x) (f(x) - w(f))^2`.
pub fn variance(w: &ProbabilityVector, f: &StateFunction) -> f64 {
    variance_slices(w.as_slice(), f.as_slice())
}

/// Allocation-free energy for hot loops; `w` need not be validated.
pub fn energy_slices(w: &[f64], a: &Generator, f: &[f64]) -> f64 {
    let n = a.dim();
    debug_assert_eq!(w.len(), n);
    debug_assert_eq!(f.len(), n);
    let mut total = 0.0;
    for x in 0..n {
        let wx = w[x];
        if wx == 0.0 {
            continue;
        }
        let mut gamma = 0.0;
        for j in 0..n {
            if j != x {
                let d = f[x] - f[j];
                gamma += a.rate(x, j) * d * d;
            }
        }
        total += wx * gamma;
    }
    total
}

/// Allocation-free variance for hot loops.
pub fn variance_slices(w: &[f64], f: &[f64]) -> f64 {
    debug_assert_eq!(w.len(), f.len());
    let mean: f64 = w.iter().zip(f).map(|(&wi, &fi)| wi * fi).sum();
    w.iter()
        .zip(f)
        .map(|(&wi, &fi)| {
            let d = fi - mean;
            wi * d * d
        })
        .sum()
}

/// Chi-square divergence `sum_x (p(x) - q(x))^2 / q(x)`.
///
/// Equals the `q`-variance of the likelihood ratio `p/q`; infinite when `p`
/// puts mass where `q` does not.
pub fn chi_square_divergence(p: &ProbabilityVector, q: &ProbabilityVector) -> f64 {
    assert_eq!(p.dim(), q.dim(), "dimension mismatch in chi-square divergence");
    let mut s = 0.0;
    for i in 0..p.dim() {
        let d = p.get(i) - q.get(i);
        if d == 0.0 {
            continue;
        }
        if q.get(i) <= 0.0 {
            return f64::INFINITY;
        }
        s += d * d / q.get(i);
    }
    s
}
