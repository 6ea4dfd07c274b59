//! Goodness-of-fit metrics: RMSE, MAPE, and the coefficient of
//! determination. Degenerate inputs (zero actuals for MAPE, constant
//! actuals for R²) are explicit errors rather than silent NaNs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("prediction length {0} does not match actual length {1}")]
    LengthMismatch(usize, usize),
    #[error("metrics need at least one sample")]
    Empty,
    #[error("MAPE undefined: actual value at index {0} is zero")]
    MapeUndefined(usize),
    #[error("R² undefined: actual series is constant")]
    R2Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mape: f64,
    pub r2: f64,
}

fn check_lengths(pred: &[f64], actual: &[f64]) -> Result<(), MetricsError> {
    if pred.len() != actual.len() {
        return Err(MetricsError::LengthMismatch(pred.len(), actual.len()));
    }
    if pred.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Root mean square error, dividing by the sample count.
pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(pred, actual)?;
    let sse: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).powi(2))
        .sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// Mean absolute percentage error; every actual value must be nonzero.
pub fn mape(pred: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(pred, actual)?;
    if let Some(pos) = actual.iter().position(|a| *a == 0.0) {
        return Err(MetricsError::MapeUndefined(pos));
    }
    let total: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| ((p - a) / a).abs())
        .sum();
    Ok(total / pred.len() as f64)
}

/// Coefficient of determination `1 - SSE/SST`; the actual series must not
/// be constant.
pub fn r_squared(pred: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(pred, actual)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let sst: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if sst == 0.0 {
        return Err(MetricsError::R2Undefined);
    }
    let sse: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).powi(2))
        .sum();
    Ok(1.0 - sse / sst)
}

pub fn compute_metrics(pred: &[f64], actual: &[f64]) -> Result<Metrics, MetricsError> {
    Ok(Metrics {
        rmse: rmse(pred, actual)?,
        mape: mape(pred, actual)?,
        r2: r_squared(pred, actual)?,
    })
}
