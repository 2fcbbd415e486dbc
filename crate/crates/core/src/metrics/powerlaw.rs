//! Log-log least-squares fit of a degree histogram.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::DegreeHistogram;

/// `count ~ exp(intercept) * degree^alpha`, fitted by ordinary least squares
/// on `(ln degree, ln count)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    /// Natural-log intercept.
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

impl PowerLawFit {
    /// Fitted count at `degree`.
    pub fn predict(&self, degree: u64) -> f64 {
        (self.intercept + self.alpha * (degree as f64).ln()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("power-law fit needs at least 2 points with degree >= 1, found {found}")]
pub struct InsufficientPoints {
    pub found: usize,
}

/// Fits the raw histogram points with degree >= 1 and count >= 1.
pub fn fit_power_law(h: &DegreeHistogram) -> Result<PowerLawFit, InsufficientPoints> {
    let points: Vec<(f64, f64)> = h
        .iter()
        .filter(|&(d, c)| d >= 1 && c >= 1)
        .map(|(d, c)| ((d as f64).ln(), (c as f64).ln()))
        .collect();
    let k = points.len();
    if k < 2 {
        return Err(InsufficientPoints { found: k });
    }
    let kf = k as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / kf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    // Degrees are distinct histogram keys, so sxx > 0.
    let alpha = sxy / sxx;
    let intercept = mean_y - alpha * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (intercept + alpha * p.0)).powi(2))
        .sum();
    let r_squared = if syy > f64::EPSILON {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        // Constant counts lie exactly on the horizontal fit.
        1.0
    };
    Ok(PowerLawFit {
        alpha,
        intercept,
        r_squared,
        points_used: k,
    })
}
