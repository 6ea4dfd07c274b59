//! Lagged regression assembly.
//!
//! Row t carries, for every regressor r with prescribed delay d_r, the
//! samples at t - d_r, ..., t - d_r - m_trc, plus a constant ambient column
//! whose coefficient is the loss offset. Rows are the consecutive steps
//! where every lag is available.

use super::{EstimationError, EstimatorConfig};
use crate::measurements::{ChannelId, MeasurementSet};
use nalgebra::{DMatrix, DVector};

/// Labels design-matrix columns back to (regressor, lag) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnLabel {
    Coefficient { regressor: String, lag: usize },
    AmbientOffset,
}

#[derive(Debug, Clone)]
pub struct RegressionProblem {
    pub design: DMatrix<f64>,
    pub target: DVector<f64>,
    pub column_map: Vec<ColumnLabel>,
    /// Sum-to-one constraint vector; `None` when normalization is relaxed.
    pub normalization_vector: Option<DVector<f64>>,
    /// Absolute step index of the first row.
    pub first_row_t: usize,
    pub target_channel: ChannelId,
    /// Per-regressor prescribed delays, in regressor order.
    pub delays: Vec<usize>,
    /// Lags kept per regressor (m_trc + 1).
    pub lags_per_regressor: usize,
}

impl RegressionProblem {
    pub fn rows(&self) -> usize {
        self.design.nrows()
    }

    pub fn cols(&self) -> usize {
        self.design.ncols()
    }

    pub fn residuals(&self, theta: &DVector<f64>) -> DVector<f64> {
        &self.target - &self.design * theta
    }
}

pub fn build_regression(
    data: &MeasurementSet,
    target: &ChannelId,
    regressors: &[ChannelId],
    delays: &[usize],
    config: &EstimatorConfig,
    gamma_cap: usize,
) -> Result<RegressionProblem, EstimationError> {
    assert_eq!(
        regressors.len(),
        delays.len(),
        "one delay per regressor channel"
    );
    for (r, &d) in regressors.iter().zip(delays) {
        if d + config.m_trc > gamma_cap {
            return Err(EstimationError::InvalidDelay {
                regressor: r.to_string(),
                delay: d,
                max: gamma_cap.saturating_sub(config.m_trc),
            });
        }
    }

    let y_series = data
        .get(target)
        .ok_or_else(|| EstimationError::UnknownChannel(target.to_string()))?;
    let mut x_series = Vec::with_capacity(regressors.len());
    for r in regressors {
        x_series.push(
            data.get(r)
                .ok_or_else(|| EstimationError::UnknownChannel(r.to_string()))?,
        );
    }

    let lags = config.m_trc + 1;
    let p = regressors.len() * lags + 1;
    let max_lag = delays.iter().max().copied().unwrap_or(0) + config.m_trc;
    let total = data.len();
    let rows = total.saturating_sub(max_lag);
    if rows < p {
        return Err(EstimationError::InsufficientData {
            channel: target.to_string(),
            needed: max_lag + p,
            available: total,
        });
    }

    let mut design = DMatrix::zeros(rows, p);
    let mut target_vec = DVector::zeros(rows);
    let tau_amb = data.tau_amb_c();
    for row in 0..rows {
        let t = max_lag + row;
        let mut col = 0;
        for (r, series) in x_series.iter().enumerate() {
            for i in 0..lags {
                design[(row, col)] = series[t - delays[r] - i];
                col += 1;
            }
        }
        design[(row, col)] = tau_amb;
        target_vec[row] = y_series[t];
    }

    let mut column_map = Vec::with_capacity(p);
    for (r, reg) in regressors.iter().enumerate() {
        for i in 0..lags {
            column_map.push(ColumnLabel::Coefficient {
                regressor: reg.node.clone(),
                lag: delays[r] + i,
            });
        }
    }
    column_map.push(ColumnLabel::AmbientOffset);

    let normalization_vector = config
        .normalization
        .then(|| DVector::from_element(p, 1.0));

    Ok(RegressionProblem {
        design,
        target: target_vec,
        column_map,
        normalization_vector,
        first_row_t: max_lag,
        target_channel: target.clone(),
        delays: delays.to_vec(),
        lags_per_regressor: lags,
    })
}
