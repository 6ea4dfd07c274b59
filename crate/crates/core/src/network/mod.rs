//! DHN topology, node-method pipe parameters, flow provenance tracing, and
//! the supply/return temperature simulator used as the ground-truth oracle.
//!
//! Networks are constant-flow: mass flows are fixed at build time and the
//! temperature dynamics are linear in the boundary temperatures. The supply
//! graph must route every source to every load through exactly one directed
//! path; the return graph is the supply graph with all edges reversed.

mod config;
mod flow;
mod kernel;
mod simulate;

pub use config::{ConstantsConfig, NetworkConfig, NodeConfig, PipeConfig};
pub use flow::{trace_flow_fractions, FlowDecomposition};
pub use kernel::pipe_kernel_params;
pub use simulate::{simulate, BoundaryConditions};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Source,
    Load,
    Junction,
}

/// A network node. Mass flow is the source injection or load withdrawal,
/// present exactly when the kind calls for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Source injection (kg/s) for sources, load withdrawal for loads,
    /// absent for junctions.
    pub mass_flow_kg_s: Option<f64>,
}

/// A pipe directed along the supply-side flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipe {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length_m: f64,
    pub area_m2: f64,
    pub lambda_kw_per_m_c: f64,
    pub mass_flow_kg_s: f64,
}

/// Physical constants shared by the whole network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Heat medium density (kg/m³).
    pub rho_w: f64,
    /// Specific heat capacity of water (kJ/(kg·°C)).
    pub c_w: f64,
    /// Simulation step length (s).
    pub dt_s: f64,
    /// Ambient temperature (°C).
    pub tau_amb_c: f64,
}

/// Node-method parameters of one pipe: integer transit delay, sub-step
/// interpolation weight, and heat-loss fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipeKernelParams {
    pub gamma: usize,
    pub alpha: f64,
    pub eta: f64,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("pipe `{pipe}` references unknown node `{node}`")]
    DanglingReference { pipe: String, node: String },
    #[error(
        "mass imbalance at node `{node}`: inflow {inflow:.6} kg/s vs outflow {outflow:.6} kg/s"
    )]
    MassImbalance {
        node: String,
        inflow: f64,
        outflow: f64,
    },
    #[error(
        "supply routing from source `{source_id}` to load `{load_id}` is not a unique path ({paths} found)"
    )]
    NonTreeRouting {
        source_id: String,
        load_id: String,
        paths: u64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pipe `{0}` has non-positive mass flow")]
    ZeroMassFlow(String),
    #[error("boundary series for `{channel}` has {available} steps, horizon needs {needed}")]
    HorizonTooShort {
        channel: String,
        needed: usize,
        available: usize,
    },
    #[error("missing boundary series for node `{0}`")]
    MissingBoundary(String),
}

/// A validated constant-flow network.
///
/// Immutable after construction; simulation and derivation read it freely
/// from multiple threads.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    nodes: Vec<Node>,
    pipes: Vec<Pipe>,
    constants: Constants,
    kernel_params: Vec<PipeKernelParams>,
    node_index: BTreeMap<String, usize>,
    /// Pipe indices entering / leaving each node, supply orientation.
    supply_in: Vec<Vec<usize>>,
    supply_out: Vec<Vec<usize>>,
    /// Topological order of the supply graph.
    topo: Vec<usize>,
    source_ids: Vec<usize>,
    load_ids: Vec<usize>,
}

impl NetworkModel {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn pipes(&self) -> &[Pipe] {
        &self.pipes
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn kernel_params(&self) -> &[PipeKernelParams] {
        &self.kernel_params
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    /// Source node indices in declaration order.
    pub fn sources(&self) -> &[usize] {
        &self.source_ids
    }

    /// Load node indices in declaration order.
    pub fn loads(&self) -> &[usize] {
        &self.load_ids
    }

    pub fn source_names(&self) -> Vec<String> {
        self.source_ids
            .iter()
            .map(|&i| self.nodes[i].id.clone())
            .collect()
    }

    pub fn load_names(&self) -> Vec<String> {
        self.load_ids.iter().map(|&i| self.nodes[i].id.clone()).collect()
    }

    pub(crate) fn supply_in(&self) -> &[Vec<usize>] {
        &self.supply_in
    }

    pub(crate) fn supply_out(&self) -> &[Vec<usize>] {
        &self.supply_out
    }

    pub(crate) fn topo(&self) -> &[usize] {
        &self.topo
    }

    fn injection(&self, node: usize) -> f64 {
        match self.nodes[node].kind {
            NodeKind::Source => self.nodes[node].mass_flow_kg_s.unwrap_or(0.0),
            _ => 0.0,
        }
    }

    fn withdrawal(&self, node: usize) -> f64 {
        match self.nodes[node].kind {
            NodeKind::Load => self.nodes[node].mass_flow_kg_s.unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// The unique supply path from `source` to `load`, as ordered pipe
    /// indices. Uniqueness is guaranteed by construction.
    pub fn unique_path(&self, source: usize, load: usize) -> Vec<usize> {
        let reach = self.reachable_from(source);
        let mut path = Vec::new();
        let mut node = load;
        while node != source {
            let mut chosen = None;
            for &p in &self.supply_in[node] {
                if reach[self.pipes[p].from] {
                    chosen = Some(p);
                    break;
                }
            }
            let p = chosen.expect("validated network has a path for every source-load pair");
            path.push(p);
            node = self.pipes[p].from;
        }
        path.reverse();
        path
    }

    fn reachable_from(&self, source: usize) -> Vec<bool> {
        let mut reach = vec![false; self.nodes.len()];
        reach[source] = true;
        for &n in &self.topo {
            if !reach[n] {
                continue;
            }
            for &p in &self.supply_out[n] {
                reach[self.pipes[p].to] = true;
            }
        }
        reach
    }

    /// Number of distinct supply paths per source-load pair, evaluated by
    /// dynamic programming over the topological order.
    fn path_counts(&self, source: usize) -> Vec<u64> {
        let mut counts = vec![0u64; self.nodes.len()];
        counts[source] = 1;
        for &n in &self.topo {
            if counts[n] == 0 {
                continue;
            }
            for &p in &self.supply_out[n] {
                let to = self.pipes[p].to;
                counts[to] = counts[to].saturating_add(counts[n]);
            }
        }
        counts
    }
}

/// Validates a parsed configuration and assembles the network model.
pub fn build_network(config: &NetworkConfig) -> Result<NetworkModel, NetworkError> {
    let constants = config.constants.to_constants()?;

    let mut nodes = Vec::with_capacity(config.nodes.len());
    let mut node_index = BTreeMap::new();
    for nc in &config.nodes {
        let node = nc.to_node()?;
        if node_index.insert(node.id.clone(), nodes.len()).is_some() {
            return Err(NetworkError::DuplicateId(node.id));
        }
        nodes.push(node);
    }

    let mut pipes = Vec::with_capacity(config.pipes.len());
    let mut pipe_ids = std::collections::BTreeSet::new();
    for pc in &config.pipes {
        if !pipe_ids.insert(pc.id.clone()) {
            return Err(NetworkError::DuplicateId(pc.id.clone()));
        }
        let lookup = |name: &str| {
            node_index
                .get(name)
                .copied()
                .ok_or_else(|| NetworkError::DanglingReference {
                    pipe: pc.id.clone(),
                    node: name.to_string(),
                })
        };
        let pipe = Pipe {
            id: pc.id.clone(),
            from: lookup(&pc.from)?,
            to: lookup(&pc.to)?,
            length_m: pc.length_m,
            area_m2: pc.area_m2,
            lambda_kw_per_m_c: pc.lambda_kw_per_m_c,
            mass_flow_kg_s: pc.mass_flow_kg_s,
        };
        if pipe.from == pipe.to {
            return Err(NetworkError::InvalidParameter(format!(
                "pipe `{}` connects node `{}` to itself",
                pipe.id, pc.from
            )));
        }
        if pipe.length_m <= 0.0 || pipe.area_m2 <= 0.0 {
            return Err(NetworkError::InvalidParameter(format!(
                "pipe `{}` needs positive length and area",
                pipe.id
            )));
        }
        if pipe.lambda_kw_per_m_c < 0.0 {
            return Err(NetworkError::InvalidParameter(format!(
                "pipe `{}` has negative loss coefficient",
                pipe.id
            )));
        }
        if pipe.mass_flow_kg_s <= 0.0 {
            return Err(NetworkError::ZeroMassFlow(pipe.id));
        }
        pipes.push(pipe);
    }

    let mut supply_in = vec![Vec::new(); nodes.len()];
    let mut supply_out = vec![Vec::new(); nodes.len()];
    for (i, pipe) in pipes.iter().enumerate() {
        supply_out[pipe.from].push(i);
        supply_in[pipe.to].push(i);
    }

    // Mass conservation per node: pipe inflow + source injection equals
    // pipe outflow + load withdrawal.
    for (n, node) in nodes.iter().enumerate() {
        let inflow: f64 = supply_in[n].iter().map(|&p| pipes[p].mass_flow_kg_s).sum();
        let outflow: f64 = supply_out[n].iter().map(|&p| pipes[p].mass_flow_kg_s).sum();
        let injection = match node.kind {
            NodeKind::Source => node.mass_flow_kg_s.unwrap_or(0.0),
            _ => 0.0,
        };
        let withdrawal = match node.kind {
            NodeKind::Load => node.mass_flow_kg_s.unwrap_or(0.0),
            _ => 0.0,
        };
        let total_in = inflow + injection;
        let total_out = outflow + withdrawal;
        let scale = total_in.abs().max(total_out.abs()).max(1.0);
        if (total_in - total_out).abs() > tol::MASS_BALANCE_REL * scale {
            return Err(NetworkError::MassImbalance {
                node: node.id.clone(),
                inflow: total_in,
                outflow: total_out,
            });
        }
    }

    let topo = topological_order(&nodes, &pipes, &supply_in)?;

    let kernel_params = pipes
        .iter()
        .map(|p| pipe_kernel_params(p, &constants))
        .collect::<Result<Vec<_>, _>>()?;

    let source_ids: Vec<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.kind == NodeKind::Source)
        .map(|(i, _)| i)
        .collect();
    let load_ids: Vec<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.kind == NodeKind::Load)
        .map(|(i, _)| i)
        .collect();
    if source_ids.is_empty() || load_ids.is_empty() {
        return Err(NetworkError::InvalidParameter(
            "network needs at least one source and one load".into(),
        ));
    }

    let model = NetworkModel {
        nodes,
        pipes,
        constants,
        kernel_params,
        node_index,
        supply_in,
        supply_out,
        topo,
        source_ids,
        load_ids,
    };

    // Tree routing: exactly one supply path for every source-load pair.
    for &s in &model.source_ids {
        let counts = model.path_counts(s);
        for &l in &model.load_ids {
            if counts[l] != 1 {
                return Err(NetworkError::NonTreeRouting {
                    source_id: model.nodes[s].id.clone(),
                    load_id: model.nodes[l].id.clone(),
                    paths: counts[l],
                });
            }
        }
    }

    Ok(model)
}

fn topological_order(
    nodes: &[Node],
    pipes: &[Pipe],
    supply_in: &[Vec<usize>],
) -> Result<Vec<usize>, NetworkError> {
    let mut indegree: Vec<usize> = supply_in.iter().map(|v| v.len()).collect();
    let mut queue: Vec<usize> = (0..nodes.len()).filter(|&n| indegree[n] == 0).collect();
    let mut order = Vec::with_capacity(nodes.len());
    let mut supply_out = vec![Vec::new(); nodes.len()];
    for (i, p) in pipes.iter().enumerate() {
        supply_out[p.from].push(i);
    }
    while let Some(n) = queue.pop() {
        order.push(n);
        for &p in &supply_out[n] {
            let to = pipes[p].to;
            indegree[to] -= 1;
            if indegree[to] == 0 {
                queue.push(to);
            }
        }
    }
    if order.len() != nodes.len() {
        // A directed cycle cannot be tree-routed; report the first node
        // stuck on the cycle.
        let stuck = (0..nodes.len())
            .find(|n| !order.contains(n))
            .expect("cycle implies a missing node");
        return Err(NetworkError::NonTreeRouting {
            source_id: nodes[stuck].id.clone(),
            load_id: nodes[stuck].id.clone(),
            paths: u64::MAX,
        });
    }
    Ok(order)
}
