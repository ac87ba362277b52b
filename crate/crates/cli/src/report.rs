//! Machine-readable experiment output: typed check payloads, the manifest,
//! and deterministic JSON/CSV writing. No timestamps anywhere — identical
//! inputs must produce identical bytes.

use crate::config::CheckKind;
use crate::error::Result;
use crate::rate::RateEstimate;
use filtstab_core::PiConstants;
use filtstab_duality::{
    BetaWeightedReport, BoundReport, ExpectationRatios, RatioDiagnostics, StabilityReport,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// One plot-ready series; written as `<name>.csv` next to the report.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesData {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl SeriesData {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            // Same shortest-round-trip encoding as the JSON report, so a
            // value prints identically in both files.
            let cells: Vec<String> = row
                .iter()
                .map(|v| serde_json::to_string(v).expect("f64 serializes"))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Decay constants of one model, with the certifying choice singled out.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsBlock {
    pub dim: usize,
    pub invariant_measure: Vec<f64>,
    #[serde(flatten)]
    pub constants: PiConstants,
    pub best_conditional: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum CheckPayload {
    Constants(ConstantsBlock),
    ConditionalDegeneracy {
        constants: ConstantsBlock,
        weights: Vec<f64>,
        test_function: Vec<f64>,
        conditional_energy: f64,
        conditional_variance: f64,
    },
    MarginalStability {
        bounds: Vec<BoundReport>,
        decay_fit: RateEstimate,
        series: String,
    },
    RatioDiagnostics(RatioDiagnostics),
    BackwardBound {
        reports: Vec<BoundReport>,
    },
    DiscountedBound(BetaWeightedReport),
    RatioEstimators(ExpectationRatios),
    StabilityCertificate {
        report: StabilityReport,
        /// Produced only when every bound holds with a positive constant.
        certified_rate: Option<f64>,
        series: String,
    },
    RateRegression {
        series: String,
        estimate: RateEstimate,
        /// Half the certified decay constant, when one exists: the rate the
        /// fitted slope is compared against.
        reference_rate: Option<f64>,
    },
    None {},
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub check: CheckKind,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub payload: CheckPayload,
}

/// Reproducibility header: component versions, the seed, and one verdict
/// per executed check.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub seed: u64,
    pub threads: usize,
    pub verdicts: BTreeMap<String, bool>,
}

/// The resolved inputs, echoed numerically so a report is self-describing.
#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub model: String,
    pub prior: Vec<f64>,
    pub stationary_prior: Vec<f64>,
    pub test_functions: Vec<Vec<f64>>,
    pub horizons: Vec<f64>,
    pub dt: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_window: Option<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub manifest: Manifest,
    pub config: ConfigEcho,
    pub checks: Vec<CheckResult>,
    pub series: Vec<SeriesData>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, kind: CheckKind) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == kind)
    }

    /// Write `report.json` plus one CSV per series; returns the paths,
    /// report first.
    pub fn write_outputs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::with_capacity(1 + self.series.len());
        let report_path = dir.join("report.json");
        std::fs::write(&report_path, self.to_json())?;
        paths.push(report_path);
        for s in &self.series {
            let path = dir.join(format!("{}.csv", s.name));
            std::fs::write(&path, s.to_csv())?;
            paths.push(path);
        }
        Ok(paths)
    }
}
