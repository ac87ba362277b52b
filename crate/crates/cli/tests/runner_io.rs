//! Config-file validation and end-to-end runner output, in-process.

use filtstab_cli::config::{CheckKind, ExperimentConfig};
use filtstab_cli::presets::preset_spec;
use filtstab_cli::runner::run_experiment;
use std::fs;
use std::path::Path;

const MODEL_2STATE: &str = r#"{
    "dim": 2,
    "rates": [[-1.0, 1.0], [2.0, -2.0]],
    "h": [1.0, 0.0],
    "R": [[1.0]]
}"#;

/// Writes the model plus a config built from `body` into `dir` and parses it.
fn parse(dir: &Path, body: &str) -> filtstab_cli::Result<ExperimentConfig> {
    fs::write(dir.join("model.json"), MODEL_2STATE).unwrap();
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    ExperimentConfig::from_file(&path).map(|(c, _)| c)
}

fn config_with(overrides: &[(&str, &str)]) -> String {
    let mut fields = vec![
        ("model", r#""model.json""#.to_string()),
        ("prior", "[0.9, 0.1]".to_string()),
        ("test_functions", "[[1.0, 0.0]]".to_string()),
        ("horizons", "[0.5, 1.0, 1.5, 2.0]".to_string()),
        ("dt", "0.01".to_string()),
        ("n_trials", "50".to_string()),
        ("seed", "7".to_string()),
        ("checks", r#"["pi_constants"]"#.to_string()),
    ];
    for (key, value) in overrides {
        match fields.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value.to_string(),
            None => fields.push((key, value.to_string())),
        }
    }
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("\"{k}\": {v}")).collect();
    format!("{{{}}}", body.join(", "))
}

fn resolve_err(dir: &Path, overrides: &[(&str, &str)]) -> String {
    match parse(dir, &config_with(overrides)) {
        Err(e) => e.to_string(),
        Ok(config) => config.resolve(Some(dir)).unwrap_err().to_string(),
    }
}

#[test]
fn invalid_configs_are_rejected_with_pointed_messages() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let cases: &[(&[(&str, &str)], &str)] = &[
        (&[("horizons", "[2.0, 1.0]")], "strictly increasing"),
        (&[("horizons", "[]")], "nonempty"),
        (&[("horizons", "[0.0, 1.0]")], "positive"),
        (&[("n_trials", "0")], "at least 1"),
        (&[("dt", "0.0")], "dt must be positive"),
        (&[("model", r#""missing.json""#)], "does not exist"),
        (&[("prior", r#""stationary""#)], "unknown keyword"),
        (&[("checks", r#"["pi_constants", "pi_constants"]"#)], "duplicate check"),
        (&[("checks", r#"["prop4"]"#)], "unknown variant"),
        (&[("checks", "[]")], "checks must be nonempty"),
        (&[("test_functions", "[[1.0, 0.0, 0.0]]")], "2-state model"),
        (&[("rate_window", "[1.0, 9.0]")], "horizon range"),
        (&[("prior", "[0.5, 0.5, 0.0]")], "2-state model"),
        (&[("frobnicate", "1")], "unknown field"),
    ];
    for (overrides, needle) in cases {
        let msg = resolve_err(dir, overrides);
        assert!(
            msg.contains(needle),
            "expected {needle:?} in error for {overrides:?}, got: {msg}"
        );
    }

    // A check that consumes a test function must refuse to run without one.
    let msg = resolve_err(
        dir,
        &[("test_functions", "[]"), ("checks", r#"["stochastic_stability"]"#)],
    );
    assert!(msg.contains("needs at least one test function"), "{msg}");
}

#[test]
fn unknown_preset_lists_the_available_names() {
    let err = preset_spec("example9").unwrap_err().to_string();
    for name in ["example1", "counterexample", "example4"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn config_run_emits_report_and_series_files() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let body = config_with(&[(
        "checks",
        r#"["pi_constants", "stochastic_stability", "theorem1", "rate_regression"]"#,
    )]);
    let config = parse(dir, &body).unwrap();
    let spec = config.resolve(Some(dir)).unwrap();
    let report = run_experiment(&spec).unwrap();

    assert_eq!(report.checks.len(), 4);
    let tokens: Vec<&str> = report.manifest.verdicts.keys().map(|k| k.as_str()).collect();
    assert_eq!(
        tokens,
        ["pi_constants", "rate_regression", "stochastic_stability", "theorem1"]
    );
    assert!(report.check(CheckKind::Constants).unwrap().passed);
    assert!(report.check(CheckKind::MarginalStability).unwrap().passed);

    let names: Vec<&str> = report.series.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["stochastic_stability_gap", "filter_gap"]);
    // One stability ensemble serves both theorem1 and the regression.
    assert_eq!(report.series[1].rows.len(), spec.horizons.len());

    let out = dir.join("out");
    let paths = report.write_outputs(&out).unwrap();
    assert_eq!(paths.len(), 3);
    assert!(paths[0].ends_with("report.json"));
    let csv = fs::read_to_string(out.join("filter_gap.csv")).unwrap();
    assert!(csv.starts_with("horizon,mean_gap,standard_error\n"), "{csv}");
    assert_eq!(csv.lines().count(), 1 + spec.horizons.len());
}

#[test]
fn rerun_with_the_same_spec_is_byte_identical() {
    let mut spec = preset_spec("example1").unwrap();
    spec.apply_overrides(Some(60), Some(0.01), None);
    spec.horizons = vec![0.5, 1.0, 1.5, 2.0];
    spec.checks = vec![
        CheckKind::Constants,
        CheckKind::RatioEstimators,
        CheckKind::StabilityCertificate,
        CheckKind::RateRegression,
    ];
    let a = run_experiment(&spec).unwrap().to_json();
    let b = run_experiment(&spec).unwrap().to_json();
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 17"));
}

#[test]
fn per_check_failures_keep_the_rest_of_the_report() {
    // 120 trials is below the diagnostics floor, so prop3 must error out
    // while its neighbours still produce payloads.
    let mut spec = preset_spec("example1").unwrap();
    spec.apply_overrides(Some(120), Some(0.01), None);
    spec.horizons = vec![0.5, 1.0];
    spec.checks = vec![
        CheckKind::Constants,
        CheckKind::RatioDiagnostics,
        CheckKind::RatioEstimators,
    ];
    let report = run_experiment(&spec).unwrap();
    let failed = report.check(CheckKind::RatioDiagnostics).unwrap();
    assert!(!failed.passed);
    let msg = failed.error.as_deref().unwrap();
    assert!(msg.starts_with("prop3:"), "{msg}");
    assert!(msg.contains("1000 trials"), "{msg}");
    assert!(report.check(CheckKind::Constants).unwrap().passed);
    assert!(report.check(CheckKind::RatioEstimators).unwrap().error.is_none());
    assert!(!report.all_passed());
}
