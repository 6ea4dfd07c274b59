//! Series prediction: slide the aggregate model along measured regressor
//! channels. Predictions start once every band's deepest lag is available,
//! i.e. at step `gamma_cap`.

use super::{AgmError, AgmModel, EntityMap};
use crate::measurements::{ChannelId, MeasurementSet, Side};

/// Predicted series for one output channel.
#[derive(Debug, Clone)]
pub struct SeriesPrediction {
    pub channel: ChannelId,
    /// Absolute step index of the first prediction.
    pub start: usize,
    pub values: Vec<f64>,
}

fn predict_entities(
    maps: &[EntityMap],
    regressors: &[&[f64]],
    out_side: Side,
    gamma_cap: usize,
    tau_amb: f64,
    len: usize,
) -> Vec<SeriesPrediction> {
    maps.iter()
        .map(|entity| {
            let values = (gamma_cap..len)
                .map(|t| {
                    let mut y = entity.offset * tau_amb;
                    for (r, band) in entity.bands.iter().enumerate() {
                        for (i, c) in band.coeffs.iter().enumerate() {
                            y += c * regressors[r][t - band.delay - i];
                        }
                    }
                    y
                })
                .collect();
            SeriesPrediction {
                channel: ChannelId::new(entity.id.clone(), out_side),
                start: gamma_cap,
                values,
            }
        })
        .collect()
}

/// Predicts every load supply series from the measured source supply
/// channels.
pub fn predict_stm_series(
    agm: &AgmModel,
    data: &MeasurementSet,
) -> Result<Vec<SeriesPrediction>, AgmError> {
    let regressors = collect(data, agm.sources(), Side::Supply)?;
    Ok(predict_entities(
        agm.stm(),
        &regressors,
        Side::Supply,
        agm.gamma_cap(),
        data.tau_amb_c(),
        data.len(),
    ))
}

/// Predicts every source return series from the measured load return
/// channels.
pub fn predict_rtm_series(
    agm: &AgmModel,
    data: &MeasurementSet,
) -> Result<Vec<SeriesPrediction>, AgmError> {
    let regressors = collect(data, agm.loads(), Side::Return)?;
    Ok(predict_entities(
        agm.rtm(),
        &regressors,
        Side::Return,
        agm.gamma_cap(),
        data.tau_amb_c(),
        data.len(),
    ))
}

fn collect<'a>(
    data: &'a MeasurementSet,
    nodes: &[String],
    side: Side,
) -> Result<Vec<&'a [f64]>, AgmError> {
    nodes
        .iter()
        .map(|n| {
            data.get(&ChannelId::new(n.clone(), side)).ok_or_else(|| {
                AgmError::InvalidModel(format!("dataset lacks channel {n}/{side}"))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agm::derive_agm;
    use crate::network::{
        build_network, simulate, trace_flow_fractions, BoundaryConditions, NetworkConfig,
    };
    use crate::tol;
    use approx::assert_abs_diff_eq;

    fn chain_network() -> NetworkConfig {
        serde_json::from_str(
            r#"{
              "constants": {"rho_w": 1000.0, "c_w": 4.2, "dt_s": 100.0, "tau_amb_c": 8.0},
              "nodes": [
                {"id": "S1", "kind": "source", "mass_flow_kg_s": 90.0},
                {"id": "J1", "kind": "junction"},
                {"id": "L1", "kind": "load", "mass_flow_kg_s": 50.0},
                {"id": "L2", "kind": "load", "mass_flow_kg_s": 40.0}
              ],
              "pipes": [
                {"id": "P1", "from": "S1", "to": "J1", "length_m": 130, "area_m2": 0.1,
                 "lambda_kw_per_m_c": 0.02, "mass_flow_kg_s": 90.0},
                {"id": "P2", "from": "J1", "to": "L1", "length_m": 260, "area_m2": 0.08,
                 "lambda_kw_per_m_c": 0.015, "mass_flow_kg_s": 50.0},
                {"id": "P3", "from": "J1", "to": "L2", "length_m": 90, "area_m2": 0.12,
                 "lambda_kw_per_m_c": 0.01, "mass_flow_kg_s": 40.0}
              ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn constant_history_at_ambient_is_fixed() {
        let model = build_network(&chain_network()).unwrap();
        let flows = trace_flow_fractions(&model).unwrap();
        let agm = derive_agm(&model, &flows).unwrap();
        let rows = agm.gamma_cap() + 1;
        let history = vec![vec![8.0]; rows];
        let out = agm.eval_stm(&history, 8.0).unwrap();
        for v in out {
            assert_abs_diff_eq!(v, 8.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_history_scales_by_transmission() {
        // Lossless everywhere except a known offset: reuse the 0.19 pipe.
        let mut config = crate::testutil::two_node_config();
        config.pipes[0].lambda_kw_per_m_c = -(0.81f64.ln()) * 4.2 * 100.0 / 100.0;
        config.constants.tau_amb_c = 0.0;
        let model = build_network(&config).unwrap();
        let flows = trace_flow_fractions(&model).unwrap();
        let agm = derive_agm(&model, &flows).unwrap();
        let rows = agm.gamma_cap() + 1;
        let out = agm.eval_stm(&vec![vec![80.0]; rows], 0.0).unwrap();
        assert_abs_diff_eq!(out[0], 64.8, epsilon = 1e-9);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let model = build_network(&chain_network()).unwrap();
        let flows = trace_flow_fractions(&model).unwrap();
        let agm = derive_agm(&model, &flows).unwrap();
        let err = agm.eval_stm(&[vec![1.0]], 0.0).unwrap_err();
        assert!(matches!(err, AgmError::ShapeMismatch { .. }));
    }

    #[test]
    fn agrees_with_simulation_after_warmup() {
        let model = build_network(&chain_network()).unwrap();
        let flows = trace_flow_fractions(&model).unwrap();
        let agm = derive_agm(&model, &flows).unwrap();

        let horizon = 80;
        let mut boundaries = BoundaryConditions::default();
        boundaries.source_supply.insert(
            "S1".into(),
            (0..horizon).map(|t| 80.0 + 5.0 * (t as f64 * 0.37).sin()).collect(),
        );
        boundaries.load_return.insert(
            "L1".into(),
            (0..horizon).map(|t| 44.0 + 3.0 * (t as f64 * 0.21).cos()).collect(),
        );
        boundaries.load_return.insert(
            "L2".into(),
            (0..horizon).map(|t| 47.0 + 2.0 * (t as f64 * 0.51).sin()).collect(),
        );
        let data = simulate(&model, &boundaries, horizon, 60.0).unwrap();

        // Predictions begin at gamma_cap, where every referenced lag is
        // measured, so agreement must be exact from the first value.
        let stm = predict_stm_series(&agm, &data).unwrap();
        let rtm = predict_rtm_series(&agm, &data).unwrap();
        for pred in stm.iter().chain(rtm.iter()) {
            let actual = data.get(&pred.channel).unwrap();
            for (offset, value) in pred.values.iter().enumerate() {
                let t = pred.start + offset;
                assert_abs_diff_eq!(*value, actual[t], epsilon = tol::ORACLE_AGREEMENT_ABS);
            }
        }
    }
}
