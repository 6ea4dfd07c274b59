//! Time-indexed temperature datasets and the operations that feed fitting:
//! noise injection, goodness-of-fit metrics, chronological splitting, and
//! the on-disk CSV format.

mod csv;
mod metrics;
mod noise;

pub use csv::{read_csv, read_csv_with_meta, write_csv, CsvMeta};
pub use metrics::{compute_metrics, mape, r_squared, rmse, Metrics};
pub use noise::{
    add_gaussian_noise, add_gaussian_noise_with, add_salt_pepper, add_salt_pepper_with, NoiseMode,
    SideFilter,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Which side of the network a channel was measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Supply,
    Return,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Supply => "supply",
            Side::Return => "return",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identifies one measured series: a node id plus the network side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId {
    pub node: String,
    pub side: Side,
}

impl ChannelId {
    pub fn new(node: impl Into<String>, side: Side) -> Self {
        Self {
            node: node.into(),
            side,
        }
    }

    pub fn supply(node: impl Into<String>) -> Self {
        Self::new(node, Side::Supply)
    }

    pub fn ret(node: impl Into<String>) -> Self {
        Self::new(node, Side::Return)
    }
}

impl std::fmt::Display for ChannelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.node, self.side)
    }
}

#[derive(Debug, Error)]
pub enum MeasurementError {
    #[error("channel {0} has length {1}, expected {2}")]
    LengthMismatch(ChannelId, usize, usize),
    #[error("channel {0} contains a non-finite temperature at step {1}")]
    NonFinite(ChannelId, usize),
    #[error("insufficient data: need {needed} samples, have {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("unknown channel {0}")]
    UnknownChannel(ChannelId),
    #[error("{path}:{line}: {message}")]
    ParseError {
        path: String,
        line: usize,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A set of equally long temperature series sharing one time base.
///
/// Channels are kept in a sorted map so that every iteration order (noise
/// application, CSV emission) is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    dt_s: f64,
    tau_amb_c: f64,
    len: usize,
    channels: BTreeMap<ChannelId, Vec<f64>>,
}

impl MeasurementSet {
    pub fn new(dt_s: f64, tau_amb_c: f64) -> Self {
        Self {
            dt_s,
            tau_amb_c,
            len: 0,
            channels: BTreeMap::new(),
        }
    }

    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    pub fn tau_amb_c(&self) -> f64 {
        self.tau_amb_c
    }

    /// Number of time steps shared by every channel.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn channel_ids(&self) -> impl Iterator<Item = &ChannelId> {
        self.channels.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ChannelId, &Vec<f64>)> {
        self.channels.iter()
    }

    pub fn get(&self, id: &ChannelId) -> Option<&[f64]> {
        self.channels.get(id).map(|v| v.as_slice())
    }

    pub fn series(&self, id: &ChannelId) -> Result<&[f64], MeasurementError> {
        self.get(id)
            .ok_or_else(|| MeasurementError::UnknownChannel(id.clone()))
    }

    /// Adds a channel; every channel must have the same length and finite
    /// values. The first insertion fixes the set length.
    pub fn insert(&mut self, id: ChannelId, series: Vec<f64>) -> Result<(), MeasurementError> {
        if self.channels.is_empty() {
            self.len = series.len();
        } else if series.len() != self.len {
            return Err(MeasurementError::LengthMismatch(id, series.len(), self.len));
        }
        if let Some(pos) = series.iter().position(|v| !v.is_finite()) {
            return Err(MeasurementError::NonFinite(id, pos));
        }
        self.channels.insert(id, series);
        Ok(())
    }

    /// Applies `f` to every sample of every channel, in sorted channel order.
    pub(crate) fn map_samples(&self, mut f: impl FnMut(&ChannelId, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (id, series) in out.channels.iter_mut() {
            for (t, v) in series.iter_mut().enumerate() {
                *v = f(id, t, *v);
            }
        }
        out
    }

    /// Chronological split: the first `n_train` steps, then the next
    /// `n_test` steps. No shuffling; order is the time axis.
    pub fn split(&self, n_train: usize, n_test: usize) -> Result<(Self, Self), MeasurementError> {
        let needed = n_train + n_test;
        if needed > self.len {
            return Err(MeasurementError::InsufficientData {
                needed,
                available: self.len,
            });
        }
        Ok((
            self.window(0, n_train),
            self.window(n_train, n_test),
        ))
    }

    /// Copies `count` steps starting at `start` into a new set.
    pub fn window(&self, start: usize, count: usize) -> Self {
        let mut out = Self::new(self.dt_s, self.tau_amb_c);
        out.len = count;
        for (id, series) in &self.channels {
            out.channels
                .insert(id.clone(), series[start..start + count].to_vec());
        }
        out
    }

    /// Drops the first `steps` samples of every channel (warm-up removal).
    pub fn discard_warmup(&self, steps: usize) -> Result<Self, MeasurementError> {
        if steps > self.len {
            return Err(MeasurementError::InsufficientData {
                needed: steps,
                available: self.len,
            });
        }
        Ok(self.window(steps, self.len - steps))
    }
}

/// Node roles carried alongside a dataset so estimators can tell regressor
/// channels from target channels without the network description.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRoles {
    pub sources: Vec<String>,
    pub loads: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_of(len: usize) -> MeasurementSet {
        let mut set = MeasurementSet::new(3600.0, 0.0);
        set.insert(ChannelId::supply("S1"), (0..len).map(|t| t as f64).collect())
            .unwrap();
        set.insert(ChannelId::ret("L1"), vec![45.0; len]).unwrap();
        set
    }

    #[test]
    fn split_is_chronological() {
        let set = set_of(500);
        let (train, test) = set.split(400, 100).unwrap();
        assert_eq!(train.len(), 400);
        assert_eq!(test.len(), 100);
        assert_eq!(train.get(&ChannelId::supply("S1")).unwrap()[399], 399.0);
        assert_eq!(test.get(&ChannelId::supply("S1")).unwrap()[0], 400.0);
    }

    #[test]
    fn split_allows_empty_test() {
        let set = set_of(10);
        let (train, test) = set.split(10, 0).unwrap();
        assert_eq!(train.len(), 10);
        assert!(test.is_empty());
    }

    #[test]
    fn split_guards_overflow() {
        let set = set_of(10);
        assert!(matches!(
            set.split(10, 1),
            Err(MeasurementError::InsufficientData {
                needed: 11,
                available: 10
            })
        ));
    }

    #[test]
    fn insert_rejects_mismatched_length() {
        let mut set = set_of(4);
        assert!(matches!(
            set.insert(ChannelId::supply("S2"), vec![1.0; 3]),
            Err(MeasurementError::LengthMismatch(_, 3, 4))
        ));
    }

    #[test]
    fn insert_rejects_non_finite() {
        let mut set = MeasurementSet::new(60.0, 0.0);
        assert!(matches!(
            set.insert(ChannelId::supply("S1"), vec![1.0, f64::NAN]),
            Err(MeasurementError::NonFinite(_, 1))
        ));
    }
}
