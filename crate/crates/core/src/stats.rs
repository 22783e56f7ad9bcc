//! Least-squares line fits used for log-log slope estimates.

use serde::Serialize;

use crate::fmt::serialize_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    #[serde(serialize_with = "serialize_f64")]
    pub slope: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub intercept: f64,
    /// Standard error of the slope; zero for two points.
    #[serde(serialize_with = "serialize_f64")]
    pub slope_stderr: f64,
}

impl LinearFit {
    /// Normal-approximation 95% band `slope -+ 1.96 stderr`.
    pub fn band95(&self) -> (f64, f64) {
        (
            self.slope - 1.96 * self.slope_stderr,
            self.slope + 1.96 * self.slope_stderr,
        )
    }
}

/// Ordinary least squares `y = slope x + intercept`; `None` for fewer than two
/// distinct abscissae.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let sse: f64 = points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// Slope of `ln y` against `ln x`, skipping non-positive or non-finite entries.
pub fn log_log_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_fit(&logs)
}
