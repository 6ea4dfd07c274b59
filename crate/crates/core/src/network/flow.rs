//! Proportional-sharing flow tracing.
//!
//! Each node's water provenance is the flow-weighted mix of the provenances
//! arriving through its inflow pipes plus any local source injection.
//! Evaluated once over the topological order, this yields the per-source
//! fraction at every load (supply split) and, through the pair flows, the
//! per-load fraction at every source on the return side.

use super::{NetworkError, NetworkModel};

/// Flow-split coefficients and the equivalent pair flows behind them.
#[derive(Debug, Clone)]
pub struct FlowDecomposition {
    pub sources: Vec<String>,
    pub loads: Vec<String>,
    /// `xi_s[k][v]`: share of load v's water coming from source k.
    pub xi_s: Vec<Vec<f64>>,
    /// `xi_r[k][v]`: share of source k's return water coming from load v.
    pub xi_r: Vec<Vec<f64>>,
    /// `pair_flow_kg_s[k][v]`: equivalent mass flow routed from source k to
    /// load v (and back).
    pub pair_flow_kg_s: Vec<Vec<f64>>,
}

pub fn trace_flow_fractions(network: &NetworkModel) -> Result<FlowDecomposition, NetworkError> {
    let n_nodes = network.nodes().len();
    let sources = network.sources().to_vec();
    let loads = network.loads().to_vec();
    let n_sources = sources.len();

    // frac[n][k]: fraction of the water at node n that source k injected.
    let mut frac = vec![vec![0.0f64; n_sources]; n_nodes];
    for &n in network.topo() {
        let mut total = 0.0;
        let mut mix = vec![0.0f64; n_sources];
        for &p in &network.supply_in()[n] {
            let pipe = &network.pipes()[p];
            total += pipe.mass_flow_kg_s;
            for k in 0..n_sources {
                mix[k] += pipe.mass_flow_kg_s * frac[pipe.from][k];
            }
        }
        let injection = network.injection(n);
        if injection > 0.0 {
            total += injection;
            if let Some(k) = sources.iter().position(|&s| s == n) {
                mix[k] += injection;
            }
        }
        if total > 0.0 {
            for k in 0..n_sources {
                mix[k] /= total;
            }
        }
        frac[n] = mix;
    }

    let mut xi_s = vec![vec![0.0f64; loads.len()]; n_sources];
    let mut pair_flow = vec![vec![0.0f64; loads.len()]; n_sources];
    for (vi, &v) in loads.iter().enumerate() {
        let withdrawal = network.withdrawal(v);
        for k in 0..n_sources {
            xi_s[k][vi] = frac[v][k];
            pair_flow[k][vi] = frac[v][k] * withdrawal;
        }
    }

    // Return split: the return graph mirrors the supply graph, so source k
    // receives back exactly the water it delivered; normalizing its pair
    // flows over loads gives the return-side shares.
    let mut xi_r = vec![vec![0.0f64; loads.len()]; n_sources];
    for k in 0..n_sources {
        let total: f64 = pair_flow[k].iter().sum();
        if total > 0.0 {
            for vi in 0..loads.len() {
                xi_r[k][vi] = pair_flow[k][vi] / total;
            }
        }
    }

    Ok(FlowDecomposition {
        sources: network.source_names(),
        loads: network.load_names(),
        xi_s,
        xi_r,
        pair_flow_kg_s: pair_flow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network, NetworkConfig};
    use approx::assert_abs_diff_eq;

    fn two_source_config() -> NetworkConfig {
        serde_json::from_str(
            r#"{
              "constants": {"rho_w": 1000.0, "c_w": 4.2, "dt_s": 100.0, "tau_amb_c": 0.0},
              "nodes": [
                {"id": "S1", "kind": "source", "mass_flow_kg_s": 60.0},
                {"id": "S2", "kind": "source", "mass_flow_kg_s": 40.0},
                {"id": "J", "kind": "junction"},
                {"id": "L1", "kind": "load", "mass_flow_kg_s": 100.0}
              ],
              "pipes": [
                {"id": "P1", "from": "S1", "to": "J", "length_m": 100, "area_m2": 0.1,
                 "lambda_kw_per_m_c": 0, "mass_flow_kg_s": 60.0},
                {"id": "P2", "from": "S2", "to": "J", "length_m": 100, "area_m2": 0.1,
                 "lambda_kw_per_m_c": 0, "mass_flow_kg_s": 40.0},
                {"id": "P3", "from": "J", "to": "L1", "length_m": 100, "area_m2": 0.1,
                 "lambda_kw_per_m_c": 0, "mass_flow_kg_s": 100.0}
              ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn single_source_owns_everything() {
        let model = build_network(&crate::network::tests::two_node_config()).unwrap();
        let flows = trace_flow_fractions(&model).unwrap();
        assert_eq!(flows.xi_s, vec![vec![1.0]]);
        assert_eq!(flows.xi_r, vec![vec![1.0]]);
    }

    #[test]
    fn junction_mixes_sixty_forty() {
        let model = build_network(&two_source_config()).unwrap();
        let flows = trace_flow_fractions(&model).unwrap();
        assert_abs_diff_eq!(flows.xi_s[0][0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(flows.xi_s[1][0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(flows.pair_flow_kg_s[0][0], 60.0, epsilon = 1e-9);
    }

    #[test]
    fn partitions_of_unity() {
        let model = build_network(&two_source_config()).unwrap();
        let flows = trace_flow_fractions(&model).unwrap();
        for vi in 0..flows.loads.len() {
            let col: f64 = (0..flows.sources.len()).map(|k| flows.xi_s[k][vi]).sum();
            assert_abs_diff_eq!(col, 1.0, epsilon = 1e-9);
        }
        for k in 0..flows.sources.len() {
            let row: f64 = flows.xi_r[k].iter().sum();
            assert_abs_diff_eq!(row, 1.0, epsilon = 1e-9);
        }
    }
}
