//! Observation channels and the on-disk model format.
//!
//! A model couples a generator with a linear-in-white-noise observation:
//! `dZ_t = h(X_t) dt + dW_t`, where `h(x)` is a vector of `m` channel
//! levels per state and `W` is a Wiener process with covariance `R dt`.
//!
//! The JSON layout is
//!
//! ```json
//! {
//!   "dim": 2,
//!   "rates": [[-1.0, 1.0], [2.0, -2.0]],
//!   "h": [[1.0], [0.0]],
//!   "R": [[1.0]]
//! }
//! ```
//!
//! with `h` of shape `dim x m` and `R` symmetric positive definite of shape
//! `m x m`. Scalar channels may abbreviate `h` to a flat array.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::generator::Generator;

/// Symmetry tolerance for `R`: beyond this the matrix is rejected rather
/// than symmetrized.
const R_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ObservationModel {
    /// Channel levels, one row per state (`dim x m`).
    h: DMatrix<f64>,
    r: DMatrix<f64>,
    r_inv: DMatrix<f64>,
    /// Lower Cholesky factor of `R`, used to color the simulated noise.
    r_sqrt: DMatrix<f64>,
}

impl ObservationModel {
    pub fn new(h: DMatrix<f64>, r: DMatrix<f64>) -> Result<Self> {
        let (d, m) = h.shape();
        if d == 0 || m == 0 {
            return Err(CoreError::Observation("h must be nonempty".into()));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::Observation("h has a nonfinite entry".into()));
        }
        if r.shape() != (m, m) {
            return Err(CoreError::Observation(format!(
                "R is {}x{}, expected {m}x{m} to match h",
                r.nrows(),
                r.ncols()
            )));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::Observation("R has a nonfinite entry".into()));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if (r[(i, j)] - r[(j, i)]).abs() > R_SYMMETRY_TOL {
                    return Err(CoreError::Observation(format!(
                        "R is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let chol = Cholesky::new(r.clone())
            .ok_or_else(|| CoreError::Observation("R is not positive definite".into()))?;
        let r_inv = chol.inverse();
        let r_sqrt = chol.l();
        Ok(Self { h, r, r_inv, r_sqrt })
    }

    /// Scalar-channel model from per-state levels and a noise variance.
    pub fn scalar(levels: Vec<f64>, r: f64) -> Result<Self> {
        let d = levels.len();
        Self::new(
            DMatrix::from_vec(d, 1, levels),
            DMatrix::from_element(1, 1, r),
        )
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn channels(&self) -> usize {
        self.h.ncols()
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// `h(x)` as an owned vector.
    pub fn level(&self, x: usize) -> DVector<f64> {
        self.h.row(x).transpose()
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn r_inv(&self) -> &DMatrix<f64> {
        &self.r_inv
    }

    pub fn r_sqrt(&self) -> &DMatrix<f64> {
        &self.r_sqrt
    }

    /// True when every state has the same channel levels, in which case
    /// observations carry no information about the state.
    pub fn is_uninformative(&self) -> bool {
        (1..self.dim()).all(|x| self.h.row(x) == self.h.row(0))
    }
}

/// A generator plus its observation channels.
#[derive(Debug, Clone)]
pub struct Model {
    pub generator: Generator,
    pub observation: ObservationModel,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    dim: usize,
    rates: Vec<Vec<f64>>,
    h: HField,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
}

/// `h` accepts either `[[..], ..]` (dim x m) or a flat `[..]` scalar channel.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HField {
    Matrix(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl Model {
    pub fn new(generator: Generator, observation: ObservationModel) -> Result<Self> {
        if generator.dim() != observation.dim() {
            return Err(CoreError::ModelFile(format!(
                "generator has {} states but h has {} rows",
                generator.dim(),
                observation.dim()
            )));
        }
        Ok(Self { generator, observation })
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Parses and validates a JSON model, reporting the first violated
    /// invariant in declaration order: dim, rates, h, R.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.dim == 0 {
            return Err(CoreError::ModelFile("dim must be at least 1".into()));
        }
        let d = file.dim;
        if file.rates.len() != d || file.rates.iter().any(|r| r.len() != d) {
            return Err(CoreError::ModelFile(format!("rates must be {d}x{d}")));
        }
        let generator = Generator::from_rows(&file.rates)?;
        let h_rows: Vec<Vec<f64>> = match file.h {
            HField::Matrix(rows) => rows,
            HField::Flat(levels) => levels.into_iter().map(|x| vec![x]).collect(),
        };
        if h_rows.len() != d {
            return Err(CoreError::ModelFile(format!(
                "h must have {d} rows, found {}",
                h_rows.len()
            )));
        }
        let m = h_rows[0].len();
        if m == 0 || h_rows.iter().any(|row| row.len() != m) {
            return Err(CoreError::ModelFile("h rows must share a positive length".into()));
        }
        let h = DMatrix::from_fn(d, m, |i, j| h_rows[i][j]);
        if file.r.len() != m || file.r.iter().any(|row| row.len() != m) {
            return Err(CoreError::ModelFile(format!(
                "R must be {m}x{m} to match h"
            )));
        }
        let r = DMatrix::from_fn(m, m, |i, j| file.r[i][j]);
        let observation = ObservationModel::new(h, r)?;
        Self::new(generator, observation)
    }

    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let d = self.dim();
        let file = ModelFile {
            dim: d,
            rates: (0..d)
                .map(|i| (0..d).map(|j| self.generator.rate(i, j)).collect())
                .collect(),
            h: HField::Matrix(
                (0..d)
                    .map(|i| {
                        (0..self.observation.channels())
                            .map(|j| self.observation.h()[(i, j)])
                            .collect()
                    })
                    .collect(),
            ),
            r: (0..self.observation.channels())
                .map(|i| {
                    (0..self.observation.channels())
                        .map(|j| self.observation.r()[(i, j)])
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }
}
