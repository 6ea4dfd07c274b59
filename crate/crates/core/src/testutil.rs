//! Shared network fixtures for unit tests.

use crate::network::NetworkConfig;

/// One source feeding one load through a single pipe with gamma = 1,
/// alpha = 1, eta = 0.
pub(crate) fn two_node_config() -> NetworkConfig {
    serde_json::from_str(
        r#"{
          "constants": {"rho_w": 1000.0, "c_w": 4.2, "dt_s": 100.0, "tau_amb_c": 0.0},
          "nodes": [
            {"id": "S1", "kind": "source", "mass_flow_kg_s": 100.0},
            {"id": "L1", "kind": "load", "mass_flow_kg_s": 100.0}
          ],
          "pipes": [
            {"id": "P1", "from": "S1", "to": "L1", "length_m": 100.0,
             "area_m2": 0.1, "lambda_kw_per_m_c": 0.0, "mass_flow_kg_s": 100.0}
          ]
        }"#,
    )
    .unwrap()
}
