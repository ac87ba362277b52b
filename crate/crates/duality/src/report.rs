//! Verdict-carrying result types shared by every bound and diagnostic check.

use serde::Serialize;

/// Width of the acceptance band for Monte Carlo checks, in standard errors.
pub const MC_SIGMA: f64 = 3.0;

/// Outcome of one inequality check `lhs <= rhs + tolerance`.
///
/// `slack` and `verdict` are derived from the other fields at construction,
/// never stored independently, so a serialized report cannot contradict
/// itself.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// Which inequality was checked, in plain words.
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub verdict: bool,
    /// Horizon the check was evaluated at.
    pub horizon: f64,
    /// Trial count behind the Monte Carlo sides; `None` for deterministic
    /// checks.
    pub n_trials: Option<usize>,
}

impl BoundReport {
    pub fn new(
        label: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        horizon: f64,
        n_trials: Option<usize>,
    ) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            tolerance,
            verdict: lhs <= rhs + tolerance,
            horizon,
            n_trials,
        }
    }
}

/// Zero-mean test of one martingale increment (or one expectation identity
/// recast as a mean-zero sample).
#[derive(Debug, Clone, Serialize)]
pub struct MartingaleDiagnostic {
    /// Which increment or identity was tested.
    pub label: String,
    pub increment_mean: f64,
    pub standard_error: f64,
    pub n_trials: usize,
    /// `|increment_mean| <= MC_SIGMA * standard_error`.
    pub verdict: bool,
}

impl MartingaleDiagnostic {
    pub fn new(label: impl Into<String>, increment_mean: f64, standard_error: f64, n_trials: usize) -> Self {
        Self {
            label: label.into(),
            increment_mean,
            standard_error,
            n_trials,
            verdict: increment_mean.abs() <= MC_SIGMA * standard_error,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_tolerance() {
        let r = BoundReport::new("x", 1.0, 0.9999, 1e-3, 1.0, None);
        assert!(r.verdict);
        assert!((r.slack - (-1e-4)).abs() < 1e-15);
        let r = BoundReport::new("x", 1.0, 0.9, 1e-3, 1.0, None);
        assert!(!r.verdict);
    }

    #[test]
    fn diagnostic_band_is_three_sigma() {
        assert!(MartingaleDiagnostic::new("m", 0.029, 0.01, 100).verdict);
        assert!(!MartingaleDiagnostic::new("m", 0.031, 0.01, 100).verdict);
    }

    #[test]
    fn reports_serialize() {
        let r = BoundReport::new("decay", 0.1, 0.2, 0.0, 2.0, Some(100));
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"verdict\":true"));
        let d = MartingaleDiagnostic::new("incr", 0.0, 0.0, 10);
        assert!(serde_json::to_string(&d).unwrap().contains("\"n_trials\":10"));
    }
}
