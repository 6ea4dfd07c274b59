//! JSON network description. Field names carry their units.

use super::{Constants, NetworkError, Node, NodeKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub constants: ConstantsConfig,
    pub nodes: Vec<NodeConfig>,
    pub pipes: Vec<PipeConfig>,
}

impl NetworkConfig {
    pub fn from_json(raw: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(raw)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub rho_w: f64,
    pub c_w: f64,
    pub dt_s: f64,
    pub tau_amb_c: f64,
}

impl ConstantsConfig {
    pub(crate) fn to_constants(&self) -> Result<Constants, NetworkError> {
        if self.rho_w <= 0.0 || self.c_w <= 0.0 || self.dt_s <= 0.0 {
            return Err(NetworkError::InvalidParameter(
                "rho_w, c_w, and dt_s must be positive".into(),
            ));
        }
        Ok(Constants {
            rho_w: self.rho_w,
            c_w: self.c_w,
            dt_s: self.dt_s,
            tau_amb_c: self.tau_amb_c,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_flow_kg_s: Option<f64>,
}

impl NodeConfig {
    pub(crate) fn to_node(&self) -> Result<Node, NetworkError> {
        match (self.kind, self.mass_flow_kg_s) {
            (NodeKind::Junction, Some(_)) => Err(NetworkError::InvalidParameter(format!(
                "junction `{}` must not declare a mass flow",
                self.id
            ))),
            (NodeKind::Junction, None) => Ok(()),
            (_, None) => Err(NetworkError::InvalidParameter(format!(
                "node `{}` needs mass_flow_kg_s",
                self.id
            ))),
            (_, Some(flow)) if flow <= 0.0 => Err(NetworkError::InvalidParameter(format!(
                "node `{}` needs a positive mass flow",
                self.id
            ))),
            (_, Some(_)) => Ok(()),
        }?;
        Ok(Node {
            id: self.id.clone(),
            kind: self.kind,
            mass_flow_kg_s: self.mass_flow_kg_s,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipeConfig {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length_m: f64,
    pub area_m2: f64,
    pub lambda_kw_per_m_c: f64,
    pub mass_flow_kg_s: f64,
}
