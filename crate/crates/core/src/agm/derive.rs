//! Analytic derivation of the aggregate model from a validated network.
//!
//! For each source-load pair the unique supply path collapses into a
//! [`PathKernel`]; the flow decomposition scales each kernel by its split
//! coefficient. The return mapping reuses the same path kernels (the return
//! network is the supply network reversed, so per-pair kernels coincide)
//! with the return-side split weights.

use super::{path_kernel, AgmError, AgmModel, Band, EntityMap};
use crate::network::{FlowDecomposition, NetworkModel};

pub fn derive_agm(
    network: &NetworkModel,
    flows: &FlowDecomposition,
) -> Result<AgmModel, AgmError> {
    let sources = network.sources().to_vec();
    let loads = network.loads().to_vec();

    // Path kernels per (source, load) pair, in source-major order.
    let mut kernels = Vec::with_capacity(sources.len());
    for &s in &sources {
        let mut row = Vec::with_capacity(loads.len());
        for &l in &loads {
            let path = network.unique_path(s, l);
            let params: Vec<_> = path
                .iter()
                .map(|&p| network.kernel_params()[p])
                .collect();
            row.push(path_kernel(&params)?);
        }
        kernels.push(row);
    }

    let gamma_cap = kernels
        .iter()
        .flatten()
        .map(|k| k.delay + k.pipe_count())
        .max()
        .expect("validated networks have at least one source-load pair");

    let stm = loads
        .iter()
        .enumerate()
        .map(|(vi, &l)| {
            let bands = (0..sources.len())
                .map(|k| Band {
                    delay: kernels[k][vi].delay,
                    coeffs: kernels[k][vi]
                        .coeffs
                        .iter()
                        .map(|c| flows.xi_s[k][vi] * c)
                        .collect(),
                })
                .collect();
            let offset = (0..sources.len())
                .map(|k| flows.xi_s[k][vi] * kernels[k][vi].loss_offset)
                .sum();
            EntityMap {
                id: network.nodes()[l].id.clone(),
                bands,
                offset,
            }
        })
        .collect();

    let rtm = sources
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let bands = (0..loads.len())
                .map(|vi| Band {
                    delay: kernels[k][vi].delay,
                    coeffs: kernels[k][vi]
                        .coeffs
                        .iter()
                        .map(|c| flows.xi_r[k][vi] * c)
                        .collect(),
                })
                .collect();
            let offset = (0..loads.len())
                .map(|vi| flows.xi_r[k][vi] * kernels[k][vi].loss_offset)
                .sum();
            EntityMap {
                id: network.nodes()[s].id.clone(),
                bands,
                offset,
            }
        })
        .collect();

    AgmModel::new(
        gamma_cap,
        network.source_names(),
        network.load_names(),
        stm,
        rtm,
    )
}
