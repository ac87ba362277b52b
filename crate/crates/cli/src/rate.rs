//! Log-linear decay-rate estimation on (horizon, value) series.

use crate::error::{CliError, Result};
use serde::Serialize;

/// Least-squares exponent fit over a horizon window.
#[derive(Debug, Clone, Serialize)]
pub struct RateEstimate {
    /// Fitted exponent (1/time); negative means decay.
    pub slope: f64,
    pub intercept: f64,
    /// Fraction of log-value variance explained; 1 for an exact exponential.
    pub r_squared: f64,
    pub window: [f64; 2],
    pub slope_se: f64,
}

/// Ordinary least squares on (t, log value) over `window` (inclusive).
///
/// Values must be strictly positive inside the window and at least three
/// points must fall in it; the slope standard error comes from the fit
/// residuals, so an exact exponential reports se = 0.
pub fn estimate_decay_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateEstimate> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::RateFit(format!("bad window [{lo}, {hi}]")));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(t, _)| *t >= lo - 1e-9 && *t <= hi + 1e-9)
        .collect();
    let offending: Vec<f64> = pts
        .iter()
        .filter(|(_, v)| !(*v > 0.0))
        .map(|(t, _)| *t)
        .collect();
    if !offending.is_empty() {
        return Err(CliError::RateFit(format!(
            "nonpositive values at horizons {offending:?}; cannot fit a log-linear decay"
        )));
    }
    if pts.len() < 3 {
        return Err(CliError::RateFit(format!(
            "need at least 3 points in [{lo}, {hi}], found {}",
            pts.len()
        )));
    }

    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|(t, _)| *t).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(CliError::RateFit("window has no time spread".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_se = (ss_res / (n - 2.0) / sxx).sqrt();

    Ok(RateEstimate {
        slope,
        intercept,
        r_squared,
        window: [lo, hi],
        slope_se,
    })
}
