//! Solving a built dispatch instance and comparing the two DHN
//! representations on the same scenario.

use super::qp::{solve_qp, QpSettings};
use super::{DispatchError, DispatchInputs, DispatchProblem, DispatchSolution};
use crate::agm::AgmModel;
use crate::network::NetworkModel;
use std::collections::BTreeMap;
use std::time::Instant;

pub fn solve_dispatch(problem: &DispatchProblem) -> Result<DispatchSolution, DispatchError> {
    solve_dispatch_with(problem, &QpSettings::default())
}

pub fn solve_dispatch_with(
    problem: &DispatchProblem,
    settings: &QpSettings,
) -> Result<DispatchSolution, DispatchError> {
    let started = Instant::now();
    let solution = solve_qp(&problem.qp, settings)?;
    let solve_time_s = started.elapsed().as_secs_f64();

    let layout = &problem.layout;
    let x = &solution.x;
    let series = |idx: &dyn Fn(usize) -> usize| -> Vec<f64> {
        (0..layout.horizon).map(|t| x[idx(t)]).collect()
    };

    let mut heat_kw = BTreeMap::new();
    let mut power_kw = BTreeMap::new();
    let mut source_supply_c = BTreeMap::new();
    let mut source_return_c = BTreeMap::new();
    for (k, source) in layout.sources.iter().enumerate() {
        heat_kw.insert(source.clone(), series(&|t| layout.heat(k, t)));
        power_kw.insert(source.clone(), series(&|t| layout.power(k, t)));
        source_supply_c.insert(source.clone(), series(&|t| layout.src_supply(k, t)));
        source_return_c.insert(source.clone(), series(&|t| layout.src_return(k, t)));
    }
    let mut load_supply_c = BTreeMap::new();
    let mut load_return_c = BTreeMap::new();
    for (v, load) in layout.loads.iter().enumerate() {
        load_supply_c.insert(load.clone(), series(&|t| layout.load_supply(v, t)));
        load_return_c.insert(load.clone(), series(&|t| layout.load_return(v, t)));
    }

    Ok(DispatchSolution {
        kind: problem.kind,
        objective: solution.objective,
        heat_kw,
        power_kw,
        source_supply_c,
        source_return_c,
        load_supply_c,
        load_return_c,
        feasibility_residual: solution.primal_residual,
        solve_time_s,
        iterations: solution.iterations,
        polished: solution.polished,
    })
}

/// Outcome of running the same scenario against both representations.
#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub cost_node: f64,
    pub cost_agm: f64,
    /// `|cost_agm - cost_node| / cost_node`.
    pub deviation: f64,
    pub solve_time_node_s: f64,
    pub solve_time_agm_s: f64,
    /// Total injected heat per step (kW), summed over sources.
    pub heat_node_kw: Vec<f64>,
    pub heat_agm_kw: Vec<f64>,
    pub node: DispatchSolution,
    pub agm: DispatchSolution,
}

fn total_heat(solution: &DispatchSolution, horizon: usize) -> Vec<f64> {
    let mut total = vec![0.0; horizon];
    for series in solution.heat_kw.values() {
        for (t, h) in series.iter().enumerate() {
            total[t] += h;
        }
    }
    total
}

/// Builds and solves the scenario against the node method and against the
/// supplied aggregate model (typically the derived model truncated to the
/// estimator order).
pub fn compare_models(
    network: &NetworkModel,
    agm: &AgmModel,
    inputs: &DispatchInputs,
) -> Result<ModelComparison, DispatchError> {
    let node_problem = super::build_dispatch_node(network, inputs)?;
    let agm_problem = super::build_dispatch_agm(agm, &network.into(), inputs)?;

    let node = solve_dispatch(&node_problem)?;
    let agm_solution = solve_dispatch(&agm_problem)?;

    let deviation = (agm_solution.objective - node.objective).abs() / node.objective.abs();
    Ok(ModelComparison {
        cost_node: node.objective,
        cost_agm: agm_solution.objective,
        deviation,
        solve_time_node_s: node.solve_time_s,
        solve_time_agm_s: agm_solution.solve_time_s,
        heat_node_kw: total_heat(&node, inputs.horizon),
        heat_agm_kw: total_heat(&agm_solution, inputs.horizon),
        node,
        agm: agm_solution,
    })
}
