//! JSON persistence for aggregate models.
//!
//! Bands (delay + taps) are the authoritative content; the file also
//! carries the dense `(gamma_cap + 1) x n_regressors` coefficient array in
//! column-major order, row 0 holding the oldest lag, for consumers that
//! want the matrix layout directly. Finite values round-trip bit-exactly.

use super::{AgmError, AgmModel, Band, EntityMap};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgmFile {
    gamma_cap: usize,
    sources: Vec<String>,
    loads: Vec<String>,
    stm: Vec<EntityFile>,
    rtm: Vec<EntityFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntityFile {
    id: String,
    offset: f64,
    bands: Vec<BandFile>,
    /// Dense coefficients, column-major, row 0 = lag gamma_cap (oldest).
    dense_col_major: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandFile {
    regressor: String,
    delay: usize,
    coeffs: Vec<f64>,
}

fn entity_to_file(entity: &EntityMap, regressors: &[String], gamma_cap: usize) -> EntityFile {
    let rows = gamma_cap + 1;
    let mut dense = vec![0.0; rows * regressors.len()];
    for (r, band) in entity.bands.iter().enumerate() {
        for (i, c) in band.coeffs.iter().enumerate() {
            let lag = band.delay + i;
            // History orientation: row 0 is the oldest sample (lag gamma_cap).
            dense[r * rows + (gamma_cap - lag)] = *c;
        }
    }
    EntityFile {
        id: entity.id.clone(),
        offset: entity.offset,
        bands: entity
            .bands
            .iter()
            .zip(regressors)
            .map(|(band, reg)| BandFile {
                regressor: reg.clone(),
                delay: band.delay,
                coeffs: band.coeffs.clone(),
            })
            .collect(),
        dense_col_major: dense,
    }
}

fn entity_from_file(
    file: EntityFile,
    regressors: &[String],
    gamma_cap: usize,
) -> Result<EntityMap, AgmError> {
    if file.bands.len() != regressors.len() {
        return Err(AgmError::InvalidModel(format!(
            "entity {} declares {} bands for {} regressors",
            file.id,
            file.bands.len(),
            regressors.len()
        )));
    }
    let rows = gamma_cap + 1;
    if file.dense_col_major.len() != rows * regressors.len() {
        return Err(AgmError::InvalidModel(format!(
            "entity {} dense array has {} entries, expected {}",
            file.id,
            file.dense_col_major.len(),
            rows * regressors.len()
        )));
    }
    let mut bands = Vec::with_capacity(file.bands.len());
    for (r, band) in file.bands.into_iter().enumerate() {
        if band.regressor != regressors[r] {
            return Err(AgmError::InvalidModel(format!(
                "entity {} band {} is for `{}`, expected `{}`",
                file.id, r, band.regressor, regressors[r]
            )));
        }
        bands.push(Band {
            delay: band.delay,
            coeffs: band.coeffs,
        });
    }
    Ok(EntityMap {
        id: file.id,
        bands,
        offset: file.offset,
    })
}

pub fn agm_to_json(model: &AgmModel) -> String {
    let file = AgmFile {
        gamma_cap: model.gamma_cap(),
        sources: model.sources().to_vec(),
        loads: model.loads().to_vec(),
        stm: model
            .stm()
            .iter()
            .map(|e| entity_to_file(e, model.sources(), model.gamma_cap()))
            .collect(),
        rtm: model
            .rtm()
            .iter()
            .map(|e| entity_to_file(e, model.loads(), model.gamma_cap()))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("model serializes")
}

pub fn agm_from_json(raw: &str) -> Result<AgmModel, AgmError> {
    let file: AgmFile =
        serde_json::from_str(raw).map_err(|e| AgmError::InvalidModel(e.to_string()))?;
    let stm = file
        .stm
        .into_iter()
        .map(|e| entity_from_file(e, &file.sources, file.gamma_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let rtm = file
        .rtm
        .into_iter()
        .map(|e| entity_from_file(e, &file.loads, file.gamma_cap))
        .collect::<Result<Vec<_>, _>>()?;
    AgmModel::new(file.gamma_cap, file.sources, file.loads, stm, rtm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let stm = vec![EntityMap {
            id: "L1".into(),
            bands: vec![Band {
                delay: 2,
                coeffs: vec![0.1 + 0.2, 1.0 / 3.0, 5e-17],
            }],
            offset: 1.0 - (0.1 + 0.2) - 1.0 / 3.0 - 5e-17,
        }];
        let rtm = vec![EntityMap {
            id: "S1".into(),
            bands: vec![Band {
                delay: 1,
                coeffs: vec![0.7, 0.25],
            }],
            offset: 0.05,
        }];
        let model =
            AgmModel::new(5, vec!["S1".into()], vec!["L1".into()], stm, rtm).unwrap();
        let json = agm_to_json(&model);
        let back = agm_from_json(&json).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn inconsistent_file_is_rejected() {
        let raw = r#"{
          "gamma_cap": 2,
          "sources": ["S1"],
          "loads": ["L1"],
          "stm": [{"id": "L1", "offset": 0.1,
                   "bands": [{"regressor": "S9", "delay": 0, "coeffs": [0.9]}],
                   "dense_col_major": [0.0, 0.0, 0.9]}],
          "rtm": [{"id": "S1", "offset": 0.1,
                   "bands": [{"regressor": "L1", "delay": 0, "coeffs": [0.9]}],
                   "dense_col_major": [0.0, 0.0, 0.9]}]
        }"#;
        assert!(matches!(agm_from_json(raw), Err(AgmError::InvalidModel(_))));
    }
}
