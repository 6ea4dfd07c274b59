//! Centralized numeric tolerances.
//!
//! Every module pulls its comparison thresholds from here so the meaning of
//! "equal" is set in exactly one place.

/// Relative tolerance for mass conservation checks at network nodes.
pub const MASS_BALANCE_REL: f64 = 1e-9;

/// Absolute tolerance on kernel identities (coefficient sums, loss
/// complements) that hold exactly in real arithmetic.
pub const KERNEL_IDENTITY_ABS: f64 = 1e-12;

/// Absolute tolerance for simulator/aggregate-model agreement after warm-up.
pub const ORACLE_AGREEMENT_ABS: f64 = 1e-9;

/// Absolute tolerance on the normalization constraint of estimated and
/// derived parameter sets.
pub const NORMALIZATION_ABS: f64 = 1e-10;

/// Primal feasibility target for the dispatch QP solver.
pub const QP_FEASIBILITY_ABS: f64 = 1e-6;

/// Relative stationarity target for the dispatch QP solver.
pub const QP_STATIONARITY_REL: f64 = 1e-6;
