//! Node-method temperature simulation.
//!
//! Per step, each pipe outlet applies a two-tap delay kernel to its inlet
//! history plus an ambient loss term:
//!
//! ```text
//! out(t) = (1 - eta) * (alpha * in(t - gamma) + (1 - alpha) * in(t - gamma - 1))
//!        + eta * tau_amb
//! ```
//!
//! and each node temperature is the mass-flow-weighted mix of incoming pipe
//! outlets and local boundary injection. The supply pass uses the pipes as
//! declared; the return pass reverses every edge, injects load return
//! temperatures, and reads source return temperatures.

use super::{NetworkError, NetworkModel, NodeKind};
use crate::measurements::{ChannelId, MeasurementSet, Side};
use std::collections::BTreeMap;

/// Boundary temperature series: supply temperatures at sources, return
/// temperatures at loads.
#[derive(Debug, Clone, Default)]
pub struct BoundaryConditions {
    pub source_supply: BTreeMap<String, Vec<f64>>,
    pub load_return: BTreeMap<String, Vec<f64>>,
}

impl BoundaryConditions {
    fn series(
        map: &BTreeMap<String, Vec<f64>>,
        node: &str,
        horizon: usize,
    ) -> Result<Vec<f64>, NetworkError> {
        let series = map
            .get(node)
            .ok_or_else(|| NetworkError::MissingBoundary(node.to_string()))?;
        if series.len() < horizon {
            return Err(NetworkError::HorizonTooShort {
                channel: node.to_string(),
                needed: horizon,
                available: series.len(),
            });
        }
        Ok(series[..horizon].to_vec())
    }
}

/// Runs the node method for `horizon` steps. History before t = 0 is filled
/// with `initial_temp_c` on both sides.
pub fn simulate(
    network: &NetworkModel,
    boundaries: &BoundaryConditions,
    horizon: usize,
    initial_temp_c: f64,
) -> Result<MeasurementSet, NetworkError> {
    let constants = network.constants();
    let mut out = MeasurementSet::new(constants.dt_s, constants.tau_amb_c);

    let mut source_inputs = Vec::new();
    for &s in network.sources() {
        let id = &network.nodes()[s].id;
        source_inputs.push((s, BoundaryConditions::series(&boundaries.source_supply, id, horizon)?));
    }
    let mut load_inputs = Vec::new();
    for &l in network.loads() {
        let id = &network.nodes()[l].id;
        load_inputs.push((l, BoundaryConditions::series(&boundaries.load_return, id, horizon)?));
    }

    // Supply pass: sources inject, loads read.
    let supply_temps = run_side(network, &source_inputs, horizon, initial_temp_c, false);
    // Return pass: loads inject, sources read.
    let return_temps = run_side(network, &load_inputs, horizon, initial_temp_c, true);

    for (s, series) in &source_inputs {
        out.insert(ChannelId::new(&network.nodes()[*s].id, Side::Supply), series.clone())
            .expect("boundary series validated");
    }
    for (l, series) in &load_inputs {
        out.insert(ChannelId::new(&network.nodes()[*l].id, Side::Return), series.clone())
            .expect("boundary series validated");
    }
    for &l in network.loads() {
        out.insert(
            ChannelId::new(&network.nodes()[l].id, Side::Supply),
            supply_temps[l].clone(),
        )
        .expect("simulated series are finite and equally long");
    }
    for &s in network.sources() {
        out.insert(
            ChannelId::new(&network.nodes()[s].id, Side::Return),
            return_temps[s].clone(),
        )
        .expect("simulated series are finite and equally long");
    }
    Ok(out)
}

/// Propagates temperatures over one side of the network and returns the full
/// per-node series. `reversed` flips every pipe for the return pass.
fn run_side(
    network: &NetworkModel,
    injections: &[(usize, Vec<f64>)],
    horizon: usize,
    initial_temp_c: f64,
    reversed: bool,
) -> Vec<Vec<f64>> {
    let constants = network.constants();
    let tau_amb = constants.tau_amb_c;
    let n_nodes = network.nodes().len();

    let injected: BTreeMap<usize, &[f64]> = injections
        .iter()
        .map(|(n, series)| (*n, series.as_slice()))
        .collect();
    let injection_flow = |n: usize| -> f64 {
        match (reversed, network.nodes()[n].kind) {
            (false, NodeKind::Source) | (true, NodeKind::Load) => {
                network.nodes()[n].mass_flow_kg_s.unwrap_or(0.0)
            }
            _ => 0.0,
        }
    };

    // Orientation-dependent adjacency: on the return side the inflows of a
    // node are the supply outflows, traversed against their direction.
    let inflows = |n: usize| -> &[usize] {
        if reversed {
            &network.supply_out()[n]
        } else {
            &network.supply_in()[n]
        }
    };
    let upstream = |p: usize| -> usize {
        if reversed {
            network.pipes()[p].to
        } else {
            network.pipes()[p].from
        }
    };

    let mut order: Vec<usize> = network.topo().to_vec();
    if reversed {
        order.reverse();
    }

    let mut temps = vec![vec![0.0f64; horizon]; n_nodes];
    for t in 0..horizon {
        for &n in &order {
            let mut flow_total = 0.0;
            let mut mix = 0.0;
            for &p in inflows(n) {
                let pipe = &network.pipes()[p];
                let k = &network.kernel_params()[p];
                let hist = |s: isize| -> f64 {
                    if s < 0 {
                        initial_temp_c
                    } else {
                        temps[upstream(p)][s as usize]
                    }
                };
                let t0 = t as isize - k.gamma as isize;
                let outlet = (1.0 - k.eta) * (k.alpha * hist(t0) + (1.0 - k.alpha) * hist(t0 - 1))
                    + k.eta * tau_amb;
                flow_total += pipe.mass_flow_kg_s;
                mix += pipe.mass_flow_kg_s * outlet;
            }
            let inj_flow = injection_flow(n);
            if inj_flow > 0.0 {
                if let Some(series) = injected.get(&n) {
                    flow_total += inj_flow;
                    mix += inj_flow * series[t];
                }
            }
            temps[n][t] = if flow_total > 0.0 {
                mix / flow_total
            } else {
                initial_temp_c
            };
        }
    }
    temps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network, NetworkConfig};
    use approx::assert_abs_diff_eq;

    fn single_pipe(dt_s: f64, length_m: f64, lambda: f64, tau_amb: f64) -> NetworkConfig {
        serde_json::from_str(&format!(
            r#"{{
              "constants": {{"rho_w": 1000.0, "c_w": 4.2, "dt_s": {dt_s}, "tau_amb_c": {tau_amb}}},
              "nodes": [
                {{"id": "S1", "kind": "source", "mass_flow_kg_s": 100.0}},
                {{"id": "L1", "kind": "load", "mass_flow_kg_s": 100.0}}
              ],
              "pipes": [
                {{"id": "P1", "from": "S1", "to": "L1", "length_m": {length_m},
                 "area_m2": 0.1, "lambda_kw_per_m_c": {lambda}, "mass_flow_kg_s": 100.0}}
              ]
            }}"#
        ))
        .unwrap()
    }

    fn boundaries(source: Vec<f64>, load: Vec<f64>) -> BoundaryConditions {
        let mut b = BoundaryConditions::default();
        b.source_supply.insert("S1".into(), source);
        b.load_return.insert("L1".into(), load);
        b
    }

    #[test]
    fn pure_delay_propagates_a_step() {
        // t_d = 1000*0.1*200/100 = 200 s = 2 steps exactly, lossless.
        let model = build_network(&single_pipe(100.0, 200.0, 0.0, 0.0)).unwrap();
        assert_eq!(model.kernel_params()[0].gamma, 2);
        assert_eq!(model.kernel_params()[0].alpha, 1.0);

        let horizon = 6;
        let set = simulate(
            &model,
            &boundaries(vec![1.0; horizon], vec![0.0; horizon]),
            horizon,
            0.0,
        )
        .unwrap();
        let load = set.get(&ChannelId::supply("L1")).unwrap();
        assert_eq!(load[..2], [0.0, 0.0]);
        assert_eq!(load[2..], [1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn steady_state_matches_loss_complement() {
        // Pick lambda so eta is exactly 0.19: lambda*L/(c_w*m) = -ln(0.81).
        let lambda = -(0.81f64.ln()) * 4.2 * 100.0 / 100.0;
        let model = build_network(&single_pipe(100.0, 100.0, lambda, 0.0)).unwrap();
        assert_abs_diff_eq!(model.kernel_params()[0].eta, 0.19, epsilon = 1e-12);

        let horizon = 50;
        let set = simulate(
            &model,
            &boundaries(vec![80.0; horizon], vec![0.0; horizon]),
            horizon,
            0.0,
        )
        .unwrap();
        let load = set.get(&ChannelId::supply("L1")).unwrap();
        assert_abs_diff_eq!(load[horizon - 1], 64.8, epsilon = 1e-9);
    }

    #[test]
    fn ambient_is_a_fixed_point() {
        let model = build_network(&single_pipe(100.0, 150.0, 0.05, 42.5)).unwrap();
        let horizon = 20;
        let set = simulate(
            &model,
            &boundaries(vec![42.5; horizon], vec![42.5; horizon]),
            horizon,
            42.5,
        )
        .unwrap();
        for (_, series) in set.iter() {
            for v in series {
                assert_abs_diff_eq!(*v, 42.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn superposition_holds_with_zero_ambient() {
        let model = build_network(&single_pipe(100.0, 130.0, 0.02, 0.0)).unwrap();
        let horizon = 30;
        let u1: Vec<f64> = (0..horizon).map(|t| (t as f64 * 0.3).sin()).collect();
        let u2: Vec<f64> = (0..horizon).map(|t| (t as f64 * 0.7).cos()).collect();
        let r1: Vec<f64> = (0..horizon).map(|t| (t as f64 * 0.5).sin()).collect();
        let r2: Vec<f64> = (0..horizon).map(|t| 1.0 + (t as f64 * 0.2).sin()).collect();
        let (a, b) = (2.0, -1.5);

        let combo_src: Vec<f64> = u1.iter().zip(&u2).map(|(x, y)| a * x + b * y).collect();
        let combo_ret: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| a * x + b * y).collect();

        let s1 = simulate(&model, &boundaries(u1, r1), horizon, 0.0).unwrap();
        let s2 = simulate(&model, &boundaries(u2, r2), horizon, 0.0).unwrap();
        let s12 = simulate(&model, &boundaries(combo_src, combo_ret), horizon, 0.0).unwrap();

        for (id, series) in s12.iter() {
            let x1 = s1.get(id).unwrap();
            let x2 = s2.get(id).unwrap();
            for t in 0..horizon {
                assert_abs_diff_eq!(series[t], a * x1[t] + b * x2[t], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn deterministic_repetition_is_bit_identical() {
        let model = build_network(&single_pipe(100.0, 170.0, 0.03, 5.0)).unwrap();
        let horizon = 25;
        let src: Vec<f64> = (0..horizon).map(|t| 80.0 + (t as f64).sin()).collect();
        let ret: Vec<f64> = (0..horizon).map(|t| 45.0 + (t as f64).cos()).collect();
        let a = simulate(&model, &boundaries(src.clone(), ret.clone()), horizon, 70.0).unwrap();
        let b = simulate(&model, &boundaries(src, ret), horizon, 70.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn short_series_is_rejected() {
        let model = build_network(&single_pipe(100.0, 100.0, 0.0, 0.0)).unwrap();
        let err = simulate(&model, &boundaries(vec![1.0; 5], vec![0.0; 10]), 10, 0.0).unwrap_err();
        assert!(matches!(err, NetworkError::HorizonTooShort { .. }));
    }
}
