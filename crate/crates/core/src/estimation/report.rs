//! Bridges from fit results to an evaluable aggregate model, plus the
//! structural diagnostics used by the experiment harness: band-violation
//! detection for sparsity-relaxed fits and coarse-fit delay bootstrapping.

use super::{EstimationError, FitResult, RtmEstimate, StmEstimate};
use crate::agm::{AgmModel, Band, EntityMap};

/// Assembles an [`AgmModel`] from estimated supply and return fits, so
/// estimated parameters evaluate through the same prediction path as
/// analytically derived ones.
pub fn estimated_agm(
    stm: &StmEstimate,
    rtm: &RtmEstimate,
    m_trc: usize,
    gamma_cap: usize,
) -> Result<AgmModel, EstimationError> {
    let lags = m_trc + 1;
    let entity = |id: &str, delays: &[usize], fit: &FitResult| -> EntityMap {
        let bands = delays
            .iter()
            .enumerate()
            .map(|(r, &delay)| Band {
                delay,
                coeffs: fit.theta[r * lags..(r + 1) * lags].to_vec(),
            })
            .collect();
        EntityMap {
            id: id.to_string(),
            bands,
            offset: *fit.theta.last().expect("theta has the offset column"),
        }
    };

    let stm_maps = stm
        .per_load
        .iter()
        .map(|est| entity(&est.load, &est.delays, &est.fit))
        .collect();
    let rtm_maps = rtm
        .per_source
        .iter()
        .map(|est| entity(&est.source, &est.delays, &est.fit))
        .collect();
    let loads = stm.per_load.iter().map(|e| e.load.clone()).collect();

    AgmModel::new(gamma_cap, stm.sources.clone(), loads, stm_maps, rtm_maps)
        .map_err(|e| EstimationError::AllCombinationsFailed {
            entity: "estimated model".into(),
            last_error: e.to_string(),
        })
}

/// True when the above-threshold coefficients of a dense lag vector do not
/// form one contiguous run — physically impossible for water transport, and
/// the tell-tale of a sparsity-relaxed fit gone unphysical.
pub fn band_violation(dense_coeffs: &[f64], threshold: f64) -> bool {
    let mut in_band = false;
    let mut band_closed = false;
    for c in dense_coeffs {
        if c.abs() > threshold {
            if band_closed {
                return true;
            }
            in_band = true;
        } else if in_band {
            band_closed = true;
            in_band = false;
        }
    }
    false
}

/// Proposes candidate delays from a coarse (wide-band) fit: the window of
/// `width` consecutive lags with the largest coefficient mass, widened by
/// `spread` on each side.
pub fn suggest_delay_candidates(
    dense_coeffs: &[f64],
    width: usize,
    spread: usize,
    max_delay: usize,
) -> Vec<usize> {
    if dense_coeffs.is_empty() {
        return vec![0];
    }
    let window = width.max(1).min(dense_coeffs.len());
    let mut best_start = 0usize;
    let mut best_mass = f64::NEG_INFINITY;
    for start in 0..=dense_coeffs.len() - window {
        let mass: f64 = dense_coeffs[start..start + window]
            .iter()
            .map(|c| c.abs())
            .sum();
        if mass > best_mass {
            best_mass = mass;
            best_start = start;
        }
    }
    let lo = best_start.saturating_sub(spread);
    let hi = (best_start + spread).min(max_delay);
    (lo..=hi.max(lo)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_band_passes() {
        assert!(!band_violation(&[0.0, 0.3, 0.4, 0.1, 0.0, 0.0], 1e-4));
        assert!(!band_violation(&[0.5, 0.5], 1e-4));
        assert!(!band_violation(&[0.0, 0.0], 1e-4));
    }

    #[test]
    fn gap_is_a_violation() {
        assert!(band_violation(&[0.0, 0.3, 0.0, 0.2, 0.0], 1e-4));
        assert!(band_violation(&[0.01, 0.0, 0.0, 0.01], 1e-3));
    }

    #[test]
    fn threshold_filters_numerical_dust() {
        assert!(!band_violation(&[1e-7, 0.3, 0.4, 1e-9, 0.0], 1e-4));
    }

    #[test]
    fn suggestion_centers_on_the_energy_window() {
        let mut dense = vec![0.0; 10];
        dense[4] = 0.4;
        dense[5] = 0.3;
        dense[6] = 0.1;
        let candidates = suggest_delay_candidates(&dense, 3, 1, 8);
        assert!(candidates.contains(&4));
        assert!(candidates.iter().all(|&d| d <= 8));
    }
}
