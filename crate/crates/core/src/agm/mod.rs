//! The aggregate model (AGM): per source-load pair, the chain of pipes on
//! the unique supply path collapses into one FIR kernel plus an ambient
//! loss offset and an integer transmission delay. The supply temperature
//! mapping (STM) expresses every load supply temperature as an affine
//! function of recent source supply temperatures; the return temperature
//! mapping (RTM) mirrors it from load returns to source returns.

mod derive;
mod eval;
mod io;

pub use derive::derive_agm;
pub use eval::{predict_rtm_series, predict_stm_series};
pub use io::{agm_from_json, agm_to_json};

use crate::network::PipeKernelParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgmError {
    #[error("path kernel needs at least one pipe")]
    EmptyPath,
    #[error("history shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("band for regressor {regressor} ends at lag {end}, beyond the horizon {gamma_cap}")]
    BandOutOfRange {
        regressor: String,
        end: usize,
        gamma_cap: usize,
    },
    #[error("entity {entity} has {got} bands, expected one per regressor ({expected})")]
    BandCountMismatch {
        entity: String,
        got: usize,
        expected: usize,
    },
    #[error("model file is inconsistent: {0}")]
    InvalidModel(String),
}

/// Aggregate kernel of one source-load path before flow-split scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct PathKernel {
    /// FIR taps `a^{k,v,0..N_p}`; one more entry than pipes on the path.
    pub coeffs: Vec<f64>,
    /// Ambient loss offset `b^{k,v} = 1 - prod(1 - eta_j)`.
    pub loss_offset: f64,
    /// Total integer transit delay, the sum of per-pipe gammas.
    pub delay: usize,
}

impl PathKernel {
    pub fn pipe_count(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Collapses an ordered pipe chain into its aggregate kernel: the discrete
/// convolution of per-pipe two-tap kernels `[(1-eta)*alpha, (1-eta)*(1-alpha)]`.
pub fn path_kernel(pipes_on_path: &[PipeKernelParams]) -> Result<PathKernel, AgmError> {
    if pipes_on_path.is_empty() {
        return Err(AgmError::EmptyPath);
    }
    let mut coeffs = vec![1.0f64];
    let mut delay = 0usize;
    let mut transmission = 1.0f64;
    for p in pipes_on_path {
        let keep = 1.0 - p.eta;
        let taps = [keep * p.alpha, keep * (1.0 - p.alpha)];
        let mut next = vec![0.0f64; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c * taps[0];
            next[i + 1] += c * taps[1];
        }
        coeffs = next;
        delay += p.gamma;
        transmission *= keep;
    }
    Ok(PathKernel {
        coeffs,
        loss_offset: 1.0 - transmission,
        delay,
    })
}

/// One regressor's contiguous coefficient band: taps start at `delay` lags.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub delay: usize,
    pub coeffs: Vec<f64>,
}

impl Band {
    /// Last lag covered by the band.
    pub fn end(&self) -> usize {
        self.delay + self.coeffs.len().saturating_sub(1)
    }

    /// Expands the band into a dense lag vector of length `gamma_cap + 1`.
    pub fn dense(&self, gamma_cap: usize) -> Vec<f64> {
        let mut out = vec![0.0; gamma_cap + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[self.delay + i] = *c;
        }
        out
    }
}

/// The affine map for one output entity (a load in the STM, a source in the
/// RTM): one band per regressor plus the ambient offset.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityMap {
    pub id: String,
    pub bands: Vec<Band>,
    /// Ambient coefficient `b~`.
    pub offset: f64,
}

impl EntityMap {
    /// `1' a 1 + b`, which equals 1 for any physically derived map.
    pub fn coefficient_total(&self) -> f64 {
        self.bands
            .iter()
            .map(|b| b.coeffs.iter().sum::<f64>())
            .sum::<f64>()
            + self.offset
    }
}

/// Minimum sample counts needed for noise-free identification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinSamples {
    pub target_samples: usize,
    pub regressor_samples: usize,
}

/// `target = (1 + gamma_cap) * n_sources + 1` output samples and
/// `regressor = gamma_cap + (1 + gamma_cap) * n_sources + 1` input samples.
pub fn min_samples(n_sources: usize, gamma_cap: usize) -> MinSamples {
    let target_samples = (1 + gamma_cap) * n_sources + 1;
    MinSamples {
        target_samples,
        regressor_samples: gamma_cap + target_samples,
    }
}

/// The full aggregate model: STM entries per load over source regressors,
/// RTM entries per source over load regressors, sharing one history horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct AgmModel {
    gamma_cap: usize,
    sources: Vec<String>,
    loads: Vec<String>,
    stm: Vec<EntityMap>,
    rtm: Vec<EntityMap>,
}

impl AgmModel {
    pub fn new(
        gamma_cap: usize,
        sources: Vec<String>,
        loads: Vec<String>,
        stm: Vec<EntityMap>,
        rtm: Vec<EntityMap>,
    ) -> Result<Self, AgmError> {
        for (maps, regs) in [(&stm, sources.len()), (&rtm, loads.len())] {
            for entity in maps.iter() {
                if entity.bands.len() != regs {
                    return Err(AgmError::BandCountMismatch {
                        entity: entity.id.clone(),
                        got: entity.bands.len(),
                        expected: regs,
                    });
                }
                for (r, band) in entity.bands.iter().enumerate() {
                    if !band.coeffs.is_empty() && band.end() > gamma_cap {
                        return Err(AgmError::BandOutOfRange {
                            regressor: format!("{}<-{}", entity.id, r),
                            end: band.end(),
                            gamma_cap,
                        });
                    }
                }
            }
        }
        Ok(Self {
            gamma_cap,
            sources,
            loads,
            stm,
            rtm,
        })
    }

    /// History horizon: bands never reach past lag `gamma_cap`.
    pub fn gamma_cap(&self) -> usize {
        self.gamma_cap
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn loads(&self) -> &[String] {
        &self.loads
    }

    /// STM maps in load order.
    pub fn stm(&self) -> &[EntityMap] {
        &self.stm
    }

    /// RTM maps in source order.
    pub fn rtm(&self) -> &[EntityMap] {
        &self.rtm
    }

    pub fn stm_for(&self, load: &str) -> Option<&EntityMap> {
        self.loads
            .iter()
            .position(|l| l == load)
            .map(|i| &self.stm[i])
    }

    pub fn rtm_for(&self, source: &str) -> Option<&EntityMap> {
        self.sources
            .iter()
            .position(|s| s == source)
            .map(|i| &self.rtm[i])
    }

    /// Evaluates the STM on a history matrix of shape `(gamma_cap + 1) x
    /// n_sources`, row 0 oldest and the last row current. Returns one load
    /// supply temperature per load, in load order.
    pub fn eval_stm(&self, history: &[Vec<f64>], tau_amb: f64) -> Result<Vec<f64>, AgmError> {
        self.eval(&self.stm, self.sources.len(), history, tau_amb)
    }

    /// Return-side mirror of [`AgmModel::eval_stm`]: history columns are
    /// load return temperatures, output is one value per source.
    pub fn eval_rtm(&self, history: &[Vec<f64>], tau_amb: f64) -> Result<Vec<f64>, AgmError> {
        self.eval(&self.rtm, self.loads.len(), history, tau_amb)
    }

    fn eval(
        &self,
        maps: &[EntityMap],
        n_regressors: usize,
        history: &[Vec<f64>],
        tau_amb: f64,
    ) -> Result<Vec<f64>, AgmError> {
        let rows = self.gamma_cap + 1;
        if history.len() != rows || history.iter().any(|r| r.len() != n_regressors) {
            return Err(AgmError::ShapeMismatch {
                expected_rows: rows,
                expected_cols: n_regressors,
                rows: history.len(),
                cols: history.first().map(|r| r.len()).unwrap_or(0),
            });
        }
        Ok(maps
            .iter()
            .map(|entity| {
                let mut y = entity.offset * tau_amb;
                for (r, band) in entity.bands.iter().enumerate() {
                    for (i, c) in band.coeffs.iter().enumerate() {
                        let lag = band.delay + i;
                        y += c * history[self.gamma_cap - lag][r];
                    }
                }
                y
            })
            .collect())
    }

    /// Truncates every band to at most `m_trc + 1` taps, folding the dropped
    /// tap mass into the ambient offset so normalization is preserved.
    pub fn truncated(&self, m_trc: usize) -> Self {
        let truncate_maps = |maps: &[EntityMap]| -> Vec<EntityMap> {
            maps.iter()
                .map(|entity| {
                    let mut offset = entity.offset;
                    let bands = entity
                        .bands
                        .iter()
                        .map(|band| {
                            if band.coeffs.len() > m_trc + 1 {
                                let kept = band.coeffs[..m_trc + 1].to_vec();
                                offset += band.coeffs[m_trc + 1..].iter().sum::<f64>();
                                Band {
                                    delay: band.delay,
                                    coeffs: kept,
                                }
                            } else {
                                band.clone()
                            }
                        })
                        .collect();
                    EntityMap {
                        id: entity.id.clone(),
                        bands,
                        offset,
                    }
                })
                .collect()
        };
        Self {
            gamma_cap: self.gamma_cap,
            sources: self.sources.clone(),
            loads: self.loads.clone(),
            stm: truncate_maps(&self.stm),
            rtm: truncate_maps(&self.rtm),
        }
    }
}
