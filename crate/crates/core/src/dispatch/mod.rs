//! Convex economic dispatch of a CHP-fed district heating network.
//!
//! The same dispatch instance builds against either DHN representation:
//! the node method (per-pipe delay kernels and node mixing as equality
//! constraints) or the aggregate model (per-load and per-source affine
//! maps). Shared decision quantities occupy identical positions in both
//! builds, so solutions compare one-to-one.

mod build;
mod compare;
pub mod qp;

pub use build::{build_dispatch_agm, build_dispatch_node, Layout};
pub use compare::{compare_models, solve_dispatch, ModelComparison};
pub use qp::{QpError, QpProblem, QpSettings, QpSolution};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Which DHN representation backs the dispatch constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DhnModelKind {
    NodeMethod,
    Agm,
}

/// CHP unit at one source node: quadratic fuel cost in electric power, a
/// fixed power-to-heat ratio, and heat output limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChpParams {
    pub source: String,
    pub cost_c2: f64,
    pub cost_c1: f64,
    pub cost_c0: f64,
    pub power_per_heat: f64,
    pub heat_min_kw: f64,
    pub heat_max_kw: f64,
}

/// Temperature operating bounds, uniform per node category.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TemperatureBounds {
    pub source_supply_c: (f64, f64),
    pub load_supply_c: (f64, f64),
    pub load_return_c: (f64, f64),
}

/// Everything a dispatch instance needs besides the DHN model itself.
#[derive(Debug, Clone)]
pub struct DispatchInputs {
    pub horizon: usize,
    /// Heat demand series per load node (kW), each at least `horizon` long.
    pub demand_kw: BTreeMap<String, Vec<f64>>,
    pub chp: Vec<ChpParams>,
    pub bounds: TemperatureBounds,
    /// Constant pre-horizon history on the supply side (°C).
    pub warm_supply_c: f64,
    /// Constant pre-horizon history on the return side (°C).
    pub warm_return_c: f64,
}

/// Physical quantities the AGM build needs from the site: specific heat,
/// ambient temperature, and the boundary mass flows.
#[derive(Debug, Clone)]
pub struct SiteParams {
    pub c_w: f64,
    pub tau_amb_c: f64,
    /// (source id, mass flow kg/s) in model source order.
    pub source_flows: Vec<(String, f64)>,
    /// (load id, mass flow kg/s) in model load order.
    pub load_flows: Vec<(String, f64)>,
}

impl From<&crate::network::NetworkModel> for SiteParams {
    fn from(network: &crate::network::NetworkModel) -> Self {
        let constants = network.constants();
        let flows = |ids: &[usize]| {
            ids.iter()
                .map(|&i| {
                    let node = &network.nodes()[i];
                    (node.id.clone(), node.mass_flow_kg_s.unwrap_or(0.0))
                })
                .collect()
        };
        Self {
            c_w: constants.c_w,
            tau_amb_c: constants.tau_amb_c,
            source_flows: flows(network.sources()),
            load_flows: flows(network.loads()),
        }
    }
}

/// A built dispatch instance: the QP plus the variable layout needed to
/// read schedules back out of a solution vector.
#[derive(Debug, Clone)]
pub struct DispatchProblem {
    pub kind: DhnModelKind,
    pub qp: QpProblem,
    pub layout: Layout,
    pub chp: Vec<ChpParams>,
}

/// Solved schedules in engineering units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispatchSolution {
    pub kind: DhnModelKind,
    pub objective: f64,
    pub heat_kw: BTreeMap<String, Vec<f64>>,
    pub power_kw: BTreeMap<String, Vec<f64>>,
    pub source_supply_c: BTreeMap<String, Vec<f64>>,
    pub source_return_c: BTreeMap<String, Vec<f64>>,
    pub load_supply_c: BTreeMap<String, Vec<f64>>,
    pub load_return_c: BTreeMap<String, Vec<f64>>,
    pub feasibility_residual: f64,
    pub solve_time_s: f64,
    pub iterations: usize,
    pub polished: bool,
}

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("bounds cannot serve the demand: {0}")]
    InfeasibleBounds(String),
    #[error("no demand series for load `{0}`")]
    MissingDemand(String),
    #[error("demand series for `{load}` has {available} steps, horizon is {needed}")]
    DemandLength {
        load: String,
        needed: usize,
        available: usize,
    },
    #[error("no CHP parameters for source `{0}`")]
    MissingChp(String),
    #[error("invalid dispatch input: {0}")]
    InvalidParameter(String),
    #[error("dispatch QP is infeasible: {0}")]
    Infeasible(String),
    #[error("dispatch QP hit the iteration cap (primal {primal_residual:.3e})")]
    MaxIterations {
        primal_residual: f64,
        dual_residual: f64,
    },
}

impl From<QpError> for DispatchError {
    fn from(e: QpError) -> Self {
        match e {
            QpError::Infeasible(msg) => DispatchError::Infeasible(msg),
            QpError::MaxIterations {
                primal_residual,
                dual_residual,
            } => DispatchError::MaxIterations {
                primal_residual,
                dual_residual,
            },
        }
    }
}
