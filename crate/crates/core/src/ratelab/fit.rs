use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regression model for measured values against eps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitModel {
    /// log(value) against log(eps).
    PurePower,
    /// log(value) against log(eps * ln(1 + mu T / eps^2) / sqrt(mu)), the
    /// regressor of the logarithmically corrected 2D estimates.
    PowerWithLog { mu: f64, t_end: f64 },
}

impl FitModel {
    pub fn regressor(&self, eps: f64) -> f64 {
        match *self {
            FitModel::PurePower => eps,
            FitModel::PowerWithLog { mu, t_end } => {
                eps / mu.sqrt() * (1.0 + mu * t_end / (eps * eps)).ln()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

/// Least squares on log-transformed data. Requires at least 3 strictly
/// positive values and a non-degenerate regressor spread.
pub fn fit_rate(eps: &[f64], values: &[f64], model: &FitModel) -> Result<Fit> {
    if eps.len() != values.len() || eps.len() < 3 {
        return Err(Error::TooFewPoints(eps.len().min(values.len())));
    }
    if values.iter().any(|&v| !(v > 0.0)) || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::NonPositiveValues);
    }
    let xs: Vec<f64> = eps.iter().map(|&e| model.regressor(e).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|&v| v.ln()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx <= 1e-14 * n {
        return Err(Error::DegenerateSpread);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(Fit { slope, intercept, residual: (ss / n).sqrt() })
}
