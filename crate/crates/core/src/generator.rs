//! Conservative generator matrices of finite-state Markov jump processes.
//!
//! A generator `A` has nonnegative off-diagonal rates `A(i, j)` (jump
//! intensity from `i` to `j`) and zero row sums. The transition semigroup is
//! `P_t = exp(t A)`, acting on functions from the right and on measures from
//! the left.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::probability::ProbabilityVector;
use crate::tolerances::{INVARIANT_RESIDUAL_TOL, ROW_SUM_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    dim: usize,
    rates: DMatrix<f64>,
}

impl Generator {
    /// Validates and wraps a rate matrix. Rejects (never repairs) nonsquare
    /// shapes, nonfinite entries, negative off-diagonal rates, and row sums
    /// exceeding [`ROW_SUM_TOL`] in absolute value.
    pub fn from_rates(rates: DMatrix<f64>) -> Result<Self> {
        let (n, m) = rates.shape();
        if n == 0 {
            return Err(CoreError::Dimension("generator must be nonempty".into()));
        }
        if n != m {
            return Err(CoreError::Generator(format!("rate matrix is {n}x{m}, not square")));
        }
        for i in 0..n {
            for j in 0..n {
                let x = rates[(i, j)];
                if !x.is_finite() {
                    return Err(CoreError::Generator(format!(
                        "entry ({i}, {j}) is not finite ({x})"
                    )));
                }
                if i != j && x < 0.0 {
                    return Err(CoreError::Generator(format!(
                        "off-diagonal rate ({i}, {j}) is negative ({x})"
                    )));
                }
            }
            let row_sum: f64 = rates.row(i).iter().sum();
            if row_sum.abs() > ROW_SUM_TOL {
                return Err(CoreError::Generator(format!(
                    "row {i} sums to {row_sum:e}, exceeds {ROW_SUM_TOL:e}"
                )));
            }
        }
        Ok(Self { dim: n, rates })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(CoreError::Generator("ragged rate rows".into()));
        }
        let rates = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_rates(rates)
    }

    /// Two-state chain with rate `lambda1` from state 0 to 1 and `lambda2`
    /// from state 1 to 0.
    pub fn two_state(lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::from_rows(&[vec![-lambda1, lambda1], vec![lambda2, -lambda2]])
    }

    /// One-directional cycle `0 -> 1 -> .. -> dim-1 -> 0` with a common rate.
    pub fn cycle(dim: usize, rate: f64) -> Result<Self> {
        if dim < 2 {
            return Err(CoreError::Dimension("cycle needs at least two states".into()));
        }
        let mut rates = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            rates[(i, i)] = -rate;
            rates[(i, (i + 1) % dim)] = rate;
        }
        Self::from_rates(rates)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rates(&self) -> &DMatrix<f64> {
        &self.rates
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rates[(i, j)]
    }

    /// Total jump intensity out of state `i`, i.e. `-A(i, i)`.
    pub fn exit_rate(&self, i: usize) -> f64 {
        -self.rates[(i, i)]
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.dim).map(|i| self.exit_rate(i)).fold(0.0, f64::max)
    }

    /// `min_{j != i} A(i, j)` for each row `i` (zero for `dim == 1`).
    pub fn row_min_offdiagonal(&self) -> DVector<f64> {
        DVector::from_fn(self.dim, |i, _| {
            let mut m = f64::INFINITY;
            for j in 0..self.dim {
                if j != i {
                    m = m.min(self.rates[(i, j)]);
                }
            }
            if m.is_finite() {
                m
            } else {
                0.0
            }
        })
    }

    /// Transition matrix `exp(t A)` (rows are conditional laws given the
    /// starting state).
    pub fn transition_matrix(&self, t: f64) -> DMatrix<f64> {
        (self.rates.clone() * t).exp()
    }

    /// States reachable from `start` along strictly positive rates.
    fn reachable(&self, start: usize, transpose: bool) -> Vec<bool> {
        let mut seen = vec![false; self.dim];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for j in 0..self.dim {
                let r = if transpose { self.rates[(j, i)] } else { self.rates[(i, j)] };
                if i != j && r > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Checks strong connectivity of the positive-rate digraph. On failure
    /// the error names a concrete ordered pair of states with no connecting
    /// path.
    pub fn check_irreducible(&self) -> Result<()> {
        let forward = self.reachable(0, false);
        if let Some(j) = forward.iter().position(|&r| !r) {
            return Err(CoreError::Reducible { from: 0, to: j });
        }
        let backward = self.reachable(0, true);
        if let Some(j) = backward.iter().position(|&r| !r) {
            return Err(CoreError::Reducible { from: j, to: 0 });
        }
        Ok(())
    }

    pub fn is_irreducible(&self) -> bool {
        self.check_irreducible().is_ok()
    }

    /// Unique invariant distribution, i.e. the probability solution of
    /// `mu^T A = 0`.
    ///
    /// Requires irreducibility. The balance equations are solved densely
    /// (one redundant equation replaced by the normalization constraint) and
    /// the residual `|| mu^T A ||_inf` is verified against
    /// [`INVARIANT_RESIDUAL_TOL`].
    pub fn invariant_measure(&self) -> Result<ProbabilityVector> {
        self.check_irreducible()?;
        let n = self.dim;
        // System: columns of A give the balance equations; the last one is
        // redundant (they sum to zero) and is replaced by sum(mu) = 1.
        let mut m = self.rates.transpose();
        let mut rhs = DVector::zeros(n);
        for j in 0..n {
            m[(n - 1, j)] = 1.0;
        }
        rhs[n - 1] = 1.0;
        let lu = m.full_piv_lu();
        let mut mu = lu
            .solve(&rhs)
            .ok_or_else(|| CoreError::Numerical("singular balance system".into()))?;
        // Irreducible chains have strictly positive invariant mass; tiny
        // negative round-off is clamped before the residual check.
        for x in mu.iter_mut() {
            if *x < 0.0 {
                if *x < -INVARIANT_RESIDUAL_TOL {
                    return Err(CoreError::Numerical(format!(
                        "invariant solve produced negative mass {x}"
                    )));
                }
                *x = 0.0;
            }
        }
        let total: f64 = mu.iter().sum();
        mu /= total;
        let residual = (self.rates.transpose() * &mu).amax();
        if residual > INVARIANT_RESIDUAL_TOL {
            return Err(CoreError::Numerical(format!(
                "invariant residual {residual:e} exceeds {INVARIANT_RESIDUAL_TOL:e}"
            )));
        }
        ProbabilityVector::from_vector(mu)
    }
}
