//! Parameter estimation for the aggregate model from measured source/load
//! temperatures.
//!
//! The estimator is a truncated lagged regression per output node with a
//! normalization equality (all coefficients plus the ambient offset sum to
//! one) and a contiguous-band sparsity structure fixed by a prescribed
//! transmission delay per regressor. Robust fits replace least squares by
//! the Huber M-estimator solved with iteratively reweighted least squares;
//! unknown delays are recovered by enumerating candidate delay combinations
//! and keeping the smallest final objective.

mod enumerate;
mod irls;
mod regression;
mod report;
mod robust;
mod wls;

pub use enumerate::{
    enumeration_counts, estimate_rtm, estimate_stm, DelayCandidates, EnumerationCounts,
    LoadEstimate, RtmEstimate, SourceEstimate, StmEstimate,
};
pub use irls::irls_fit;
pub use regression::{build_regression, ColumnLabel, RegressionProblem};
pub use report::{band_violation, estimated_agm, suggest_delay_candidates};
pub use robust::{huber_objective, huber_weight, mad_scale};
pub use wls::solve_constrained_wls;

use thiserror::Error;

/// Loss function driving the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    /// Plain least squares (one constrained WLS solve with unit weights).
    Lse,
    /// Huber M-estimator via IRLS.
    Hme,
}

/// Tuning knobs of the estimator.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EstimatorConfig {
    /// Truncation horizon: each regressor keeps `m_trc + 1` lags.
    pub m_trc: usize,
    /// Huber tuning constant.
    pub kappa: f64,
    /// MAD-to-sigma consistency factor for normal residuals.
    pub mad_factor: f64,
    /// IRLS stop threshold on the residual-change norm.
    pub tol: f64,
    /// IRLS iteration cap.
    pub max_iter: usize,
    /// Floor for the residual scale; `None` derives it from the target RMS.
    pub scale_floor: Option<f64>,
    /// Enforce the sum-to-one equality.
    pub normalization: bool,
    /// Clip negative coefficients via iterated equality pinning.
    pub nonnegative: bool,
    pub loss: Loss,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            m_trc: 4,
            kappa: 1.345,
            mad_factor: 1.4826,
            tol: 1e-6,
            max_iter: 50,
            scale_floor: None,
            normalization: true,
            nonnegative: false,
            loss: Loss::Hme,
        }
    }
}

/// Outcome of one fit: the stacked coefficient vector in column order
/// (per-regressor lag bands, then the ambient offset).
#[derive(Debug, Clone)]
pub struct FitResult {
    pub theta: Vec<f64>,
    pub residuals: Vec<f64>,
    pub scale: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub weights: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("insufficient data for `{channel}`: need {needed} samples, have {available}")]
    InsufficientData {
        channel: String,
        needed: usize,
        available: usize,
    },
    #[error("dataset lacks channel {0}")]
    UnknownChannel(String),
    #[error("delay {delay} for regressor `{regressor}` exceeds the cap {max}")]
    InvalidDelay {
        regressor: String,
        delay: usize,
        max: usize,
    },
    #[error("regression is rank-deficient even after ridge regularization")]
    DegenerateProblem,
    #[error("IRLS did not converge within the iteration cap")]
    NotConverged(Box<FitResult>),
    #[error("weight vector has {got} entries, problem has {expected} rows")]
    WeightCount { expected: usize, got: usize },
    #[error("no delay candidates for pair ({source_id}, {load_id})")]
    MissingCandidates { source_id: String, load_id: String },
    #[error("every delay combination failed for `{entity}`; last error: {last_error}")]
    AllCombinationsFailed { entity: String, last_error: String },
}
