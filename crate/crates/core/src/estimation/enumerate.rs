//! Delay-parameter enumeration.
//!
//! Transmission delays enter the regression through the band positions, so
//! they cannot be estimated by the weighted solve itself. Instead, every
//! combination of candidate delays is fitted independently and the
//! combination with the smallest final objective wins; ties go to the
//! lexicographically smallest delays so results do not depend on
//! evaluation order. The return mappings reuse the winning supply-side
//! delays, one fit per source, which keeps the total solve count at
//! `K_s + n_loads`.

use super::regression::build_regression;
use super::{irls_fit, EstimationError, EstimatorConfig, FitResult};
use crate::measurements::{ChannelId, MeasurementSet, Side};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Candidate delay sets per (source, load) pair. Sets are non-empty and
/// strictly increasing.
#[derive(Debug, Clone, Default)]
pub struct DelayCandidates {
    map: BTreeMap<(String, String), Vec<usize>>,
}

impl DelayCandidates {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: &str, load: &str, mut candidates: Vec<usize>) {
        assert!(!candidates.is_empty(), "candidate set must be non-empty");
        candidates.sort_unstable();
        candidates.dedup();
        self.map
            .insert((source.to_string(), load.to_string()), candidates);
    }

    /// Same candidate range for every pair.
    pub fn uniform(sources: &[String], loads: &[String], candidates: Vec<usize>) -> Self {
        let mut out = Self::new();
        for s in sources {
            for l in loads {
                out.insert(s, l, candidates.clone());
            }
        }
        out
    }

    pub fn get(&self, source: &str, load: &str) -> Option<&[usize]> {
        self.map
            .get(&(source.to_string(), load.to_string()))
            .map(|v| v.as_slice())
    }

    pub fn sizes(&self, sources: &[String], loads: &[String]) -> Vec<Vec<usize>> {
        sources
            .iter()
            .map(|s| {
                loads
                    .iter()
                    .map(|l| self.get(s, l).map(|c| c.len()).unwrap_or(0))
                    .collect()
            })
            .collect()
    }
}

/// Estimator solve counts implied by the candidate set sizes
/// (`sizes[k][v]` = number of candidates for source k, load v).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCounts {
    /// Fits for the supply mappings: one enumeration per load.
    pub k_s: u128,
    /// Fits a full return-side enumeration would need.
    pub k_r: u128,
    /// Fits of the staged method: supply enumeration plus one fit per load
    /// transferred to the return side.
    pub k_sum: u128,
}

pub fn enumeration_counts(sizes: &[Vec<usize>]) -> EnumerationCounts {
    let n_sources = sizes.len();
    let n_loads = sizes.first().map(|r| r.len()).unwrap_or(0);
    let mut k_s: u128 = 0;
    for v in 0..n_loads {
        let mut product: u128 = 1;
        for row in sizes.iter() {
            product = product.saturating_mul(row[v] as u128);
        }
        k_s = k_s.saturating_add(product);
    }
    let mut k_r: u128 = 0;
    for row in sizes.iter().take(n_sources) {
        let mut product: u128 = 1;
        for &size in row {
            product = product.saturating_mul(size as u128);
        }
        k_r = k_r.saturating_add(product);
    }
    EnumerationCounts {
        k_s,
        k_r,
        k_sum: k_s.saturating_add(n_loads as u128),
    }
}

/// Winning fit for one load's supply mapping.
#[derive(Debug, Clone)]
pub struct LoadEstimate {
    pub load: String,
    /// Chosen delay per source, in source order.
    pub delays: Vec<usize>,
    pub fit: FitResult,
    pub combinations_evaluated: usize,
}

#[derive(Debug, Clone)]
pub struct StmEstimate {
    pub sources: Vec<String>,
    pub per_load: Vec<LoadEstimate>,
}

impl StmEstimate {
    /// Delay map keyed by (source, load), for transfer to the return side.
    pub fn delay_map(&self) -> BTreeMap<(String, String), usize> {
        let mut map = BTreeMap::new();
        for est in &self.per_load {
            for (k, d) in est.delays.iter().enumerate() {
                map.insert((self.sources[k].clone(), est.load.clone()), *d);
            }
        }
        map
    }
}

/// Fit for one source's return mapping (delays transferred, no enumeration).
#[derive(Debug, Clone)]
pub struct SourceEstimate {
    pub source: String,
    /// Delay per load, in load order.
    pub delays: Vec<usize>,
    pub fit: FitResult,
}

#[derive(Debug, Clone)]
pub struct RtmEstimate {
    pub loads: Vec<String>,
    pub per_source: Vec<SourceEstimate>,
}

fn cartesian(sets: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for set in sets {
        let mut next = Vec::with_capacity(combos.len() * set.len());
        for combo in &combos {
            for &d in *set {
                let mut c = combo.clone();
                c.push(d);
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// A fit usable for delay scoring: converged results directly, and
/// non-converged iterates through the error payload (the caller sees the
/// `converged` flag). Hard failures propagate as errors.
fn scoreable(result: Result<FitResult, EstimationError>) -> Result<FitResult, EstimationError> {
    match result {
        Ok(fit) => Ok(fit),
        Err(EstimationError::NotConverged(fit)) => Ok(*fit),
        Err(other) => Err(other),
    }
}

/// Estimates every load's supply mapping by enumerating candidate delay
/// combinations. Combinations evaluate in parallel; the reduction picks the
/// smallest objective with lexicographic tie-breaking, so the outcome is
/// independent of scheduling.
pub fn estimate_stm(
    data: &MeasurementSet,
    sources: &[String],
    loads: &[String],
    candidates: &DelayCandidates,
    config: &EstimatorConfig,
    gamma_cap: usize,
) -> Result<StmEstimate, EstimationError> {
    let regressors: Vec<ChannelId> = sources.iter().map(ChannelId::supply).collect();
    let mut per_load = Vec::with_capacity(loads.len());

    for load in loads {
        let target = ChannelId::new(load.clone(), Side::Supply);
        let mut sets = Vec::with_capacity(sources.len());
        for source in sources {
            sets.push(candidates.get(source, load).ok_or_else(|| {
                EstimationError::MissingCandidates {
                    source_id: source.clone(),
                    load_id: load.clone(),
                }
            })?);
        }
        let combos = cartesian(&sets);

        let outcomes: Vec<(usize, Result<FitResult, EstimationError>)> = combos
            .par_iter()
            .enumerate()
            .map(|(i, delays)| {
                let result = build_regression(data, &target, &regressors, delays, config, gamma_cap)
                    .and_then(|problem| scoreable(irls_fit(&problem, config)));
                (i, result)
            })
            .collect();

        let mut best: Option<(f64, usize, FitResult)> = None;
        let mut last_error = String::new();
        for (i, outcome) in outcomes {
            match outcome {
                Ok(fit) => {
                    let better = match &best {
                        None => true,
                        // Combos enumerate in lexicographic delay order, so
                        // a strictly smaller objective or an equal objective
                        // at a smaller index wins.
                        Some((obj, idx, _)) => {
                            fit.objective < *obj || (fit.objective == *obj && i < *idx)
                        }
                    };
                    if better {
                        best = Some((fit.objective, i, fit));
                    }
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        let (_, idx, fit) = best.ok_or_else(|| EstimationError::AllCombinationsFailed {
            entity: load.clone(),
            last_error: last_error.clone(),
        })?;
        per_load.push(LoadEstimate {
            load: load.clone(),
            delays: combos[idx].clone(),
            fit,
            combinations_evaluated: combos.len(),
        });
    }

    Ok(StmEstimate {
        sources: sources.to_vec(),
        per_load,
    })
}

/// Estimates every source's return mapping with the band structure fixed by
/// the transferred supply-side delays: exactly one fit per source.
pub fn estimate_rtm(
    data: &MeasurementSet,
    sources: &[String],
    loads: &[String],
    stm_delays: &BTreeMap<(String, String), usize>,
    config: &EstimatorConfig,
    gamma_cap: usize,
) -> Result<RtmEstimate, EstimationError> {
    let regressors: Vec<ChannelId> = loads.iter().map(ChannelId::ret).collect();
    let mut per_source = Vec::with_capacity(sources.len());
    for source in sources {
        let mut delays = Vec::with_capacity(loads.len());
        for load in loads {
            let d = stm_delays
                .get(&(source.clone(), load.clone()))
                .ok_or_else(|| EstimationError::MissingCandidates {
                    source_id: source.clone(),
                    load_id: load.clone(),
                })?;
            delays.push(*d);
        }
        let target = ChannelId::new(source.clone(), Side::Return);
        let problem = build_regression(data, &target, &regressors, &delays, config, gamma_cap)?;
        let fit = scoreable(irls_fit(&problem, config))?;
        per_source.push(SourceEstimate {
            source: source.clone(),
            delays,
            fit,
        });
    }
    Ok(RtmEstimate {
        loads: loads.to_vec(),
        per_source,
    })
}
