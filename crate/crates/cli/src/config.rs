//! Experiment configuration: the JSON schema, validation, and resolution
//! into a runnable specification.

use crate::error::{CliError, Result};
use filtstab_core::{Model, ProbabilityVector, StateFunction};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

/// Check identifiers. The serialized tokens are part of the config-file
/// format and stay frozen; the Rust names say what each check does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    /// Report every decay constant of the model chain.
    #[serde(rename = "pi_constants")]
    Constants,
    /// Verify that the conditional constants all vanish while the flat-case
    /// constant stays positive, witnessed by a test function with zero
    /// conditional energy but positive conditional variance.
    #[serde(rename = "counterexample")]
    ConditionalDegeneracy,
    /// Deterministic marginal-flow stability bounds plus a decay-rate fit.
    #[serde(rename = "stochastic_stability")]
    MarginalStability,
    /// Martingale diagnostics for the running posterior-ratio moment.
    #[serde(rename = "prop3")]
    RatioDiagnostics,
    /// Literal backward variance inequalities and their companion.
    #[serde(rename = "backward_ineq")]
    BackwardBound,
    /// Pathwise-discounted backward inequality and its companion.
    #[serde(rename = "beta_ineq")]
    DiscountedBound,
    /// Squared-mean ratio estimators against the exact prior floor.
    #[serde(rename = "rt")]
    RatioEstimators,
    /// Pathwise filter stability bound; certifies a decay rate on success.
    #[serde(rename = "theorem1")]
    StabilityCertificate,
    /// Log-linear regression of the mean filter gap over a horizon window.
    #[serde(rename = "rate_regression")]
    RateRegression,
}

impl CheckKind {
    pub fn token(self) -> &'static str {
        match self {
            CheckKind::Constants => "pi_constants",
            CheckKind::ConditionalDegeneracy => "counterexample",
            CheckKind::MarginalStability => "stochastic_stability",
            CheckKind::RatioDiagnostics => "prop3",
            CheckKind::BackwardBound => "backward_ineq",
            CheckKind::DiscountedBound => "beta_ineq",
            CheckKind::RatioEstimators => "rt",
            CheckKind::StabilityCertificate => "theorem1",
            CheckKind::RateRegression => "rate_regression",
        }
    }

    fn needs_test_function(self) -> bool {
        matches!(
            self,
            CheckKind::ConditionalDegeneracy
                | CheckKind::MarginalStability
                | CheckKind::StabilityCertificate
                | CheckKind::RateRegression
        )
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A prior: explicit weights, or the invariant measure of the model chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Keyword(String),
    Weights(Vec<f64>),
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec::Keyword("invariant".into())
    }
}

impl PriorSpec {
    fn resolve(&self, model: &Model, field: &str) -> Result<ProbabilityVector> {
        match self {
            PriorSpec::Keyword(k) if k == "invariant" => {
                Ok(model.generator.invariant_measure()?)
            }
            PriorSpec::Keyword(k) => Err(CliError::Config(format!(
                "{field}: unknown keyword {k:?}; expected \"invariant\" or a weight vector"
            ))),
            PriorSpec::Weights(w) => {
                if w.len() != model.dim() {
                    return Err(CliError::Config(format!(
                        "{field}: {} weights for a {}-state model",
                        w.len(),
                        model.dim()
                    )));
                }
                Ok(ProbabilityVector::new(w.clone())?)
            }
        }
    }
}

/// On-disk experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Path to the model JSON, relative to the config file.
    pub model: String,
    /// Filter prior under test.
    pub prior: PriorSpec,
    /// Reference prior; defaults to the invariant measure.
    #[serde(default)]
    pub stationary_prior: PriorSpec,
    #[serde(default)]
    pub test_functions: Vec<Vec<f64>>,
    pub horizons: Vec<f64>,
    pub dt: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckKind>,
    /// Window for the rate regression; defaults to the upper half of the
    /// horizon range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_window: Option<[f64; 2]>,
}

impl ExperimentConfig {
    /// Parse a config file; returns the config plus the directory model
    /// paths are resolved against.
    pub fn from_file(path: &Path) -> Result<(Self, Option<PathBuf>)> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((config, path.parent().map(Path::to_path_buf)))
    }

    /// Validate and load everything the runner needs.
    pub fn resolve(&self, base: Option<&Path>) -> Result<ExperimentSpec> {
        if self.horizons.is_empty() {
            return Err(CliError::Config("horizons must be nonempty".into()));
        }
        for w in self.horizons.windows(2) {
            if !(w[1] > w[0]) {
                return Err(CliError::Config(format!(
                    "horizons must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if !(self.horizons[0] > 0.0) || !self.horizons.iter().all(|t| t.is_finite()) {
            return Err(CliError::Config("horizons must be positive and finite".into()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(CliError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.n_trials == 0 {
            return Err(CliError::Config("n_trials must be at least 1".into()));
        }
        if self.checks.is_empty() {
            return Err(CliError::Config("checks must be nonempty".into()));
        }
        for (i, kind) in self.checks.iter().enumerate() {
            if self.checks[..i].contains(kind) {
                return Err(CliError::Config(format!("duplicate check {kind}")));
            }
        }

        let model_path = match base {
            Some(dir) if Path::new(&self.model).is_relative() => dir.join(&self.model),
            _ => PathBuf::from(&self.model),
        };
        if !model_path.exists() {
            return Err(CliError::Config(format!(
                "model file {} does not exist",
                model_path.display()
            )));
        }
        let model = Model::from_json_file(&model_path)?;

        let mu0 = self.prior.resolve(&model, "prior")?;
        let mu_bar = self.stationary_prior.resolve(&model, "stationary_prior")?;

        let mut test_functions = Vec::with_capacity(self.test_functions.len());
        for (i, f) in self.test_functions.iter().enumerate() {
            if f.len() != model.dim() {
                return Err(CliError::Config(format!(
                    "test_functions[{i}]: {} entries for a {}-state model",
                    f.len(),
                    model.dim()
                )));
            }
            test_functions.push(StateFunction::new(f.clone())?);
        }
        if test_functions.is_empty() {
            if let Some(kind) = self.checks.iter().find(|k| k.needs_test_function()) {
                return Err(CliError::Config(format!(
                    "check {kind} needs at least one test function"
                )));
            }
        }

        let rate_window = match self.rate_window {
            None => None,
            Some([lo, hi]) => {
                let (first, last) = (self.horizons[0], *self.horizons.last().unwrap());
                if !(lo < hi) || lo < first - 1e-9 || hi > last + 1e-9 {
                    return Err(CliError::Config(format!(
                        "rate_window [{lo}, {hi}] must lie inside the horizon range [{first}, {last}]"
                    )));
                }
                Some((lo, hi))
            }
        };

        Ok(ExperimentSpec {
            model,
            model_ref: self.model.clone(),
            mu0,
            mu_bar,
            test_functions,
            horizons: self.horizons.clone(),
            dt: self.dt,
            n_trials: self.n_trials,
            seed: self.seed,
            checks: self.checks.clone(),
            rate_window,
        })
    }
}

/// Fully resolved experiment: model loaded, priors expanded, inputs checked.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub model: Model,
    /// Where the model came from: a file path or a `builtin:` tag.
    pub model_ref: String,
    pub mu0: ProbabilityVector,
    pub mu_bar: ProbabilityVector,
    pub test_functions: Vec<StateFunction>,
    pub horizons: Vec<f64>,
    pub dt: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckKind>,
    pub rate_window: Option<(f64, f64)>,
}

impl ExperimentSpec {
    pub fn apply_overrides(&mut self, trials: Option<usize>, dt: Option<f64>, seed: Option<u64>) {
        if let Some(n) = trials {
            self.n_trials = n.max(1);
        }
        if let Some(dt) = dt {
            if dt > 0.0 && dt.is_finite() {
                self.dt = dt;
            }
        }
        if let Some(s) = seed {
            self.seed = s;
        }
    }

    pub fn first_test_function(&self, kind: CheckKind) -> Result<&StateFunction> {
        self.test_functions
            .first()
            .ok_or_else(|| CliError::Config(format!("check {kind} needs a test function")))
    }
}
