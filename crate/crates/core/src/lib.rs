//! District heating network (DHN) modeling and identification toolkit.
//!
//! The crate covers four stages of a source-to-load modeling workflow:
//!
//! * [`network`] — DHN topology, node-method pipe dynamics, flow tracing,
//!   and ground-truth temperature simulation.
//! * [`agm`] — the aggregate model (supply/return temperature mappings)
//!   derived analytically from a network, plus forward evaluation.
//! * [`measurements`] — time-series datasets, noise injection, metrics,
//!   and CSV round-tripping.
//! * [`estimation`] — constrained least squares and Huber M-estimation of
//!   aggregate-model parameters from corrupted measurements, with delay
//!   enumeration.
//! * [`dispatch`] — a small convex economic dispatch built twice (node
//!   method vs. aggregate model) to compare cost and runtime.

pub mod agm;
pub mod dispatch;
pub mod estimation;
pub mod measurements;
pub mod network;
pub mod tol;

#[cfg(test)]
pub(crate) mod testutil;
