//! Seeded measurement corruption: Gaussian noise and salt-and-pepper
//! multiplicative outliers.
//!
//! All draws come from a ChaCha8 stream seeded by the caller, applied over
//! channels in sorted order, so a fixed seed reproduces bit-identical output
//! on every platform.

use super::{MeasurementSet, Side};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// How the Gaussian standard deviation is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// `std` is a fraction of each sample: `x * (1 + eps)`.
    Relative,
    /// `std` is in degrees Celsius: `x + eps`.
    AbsoluteCelsius,
}

/// Which channels to corrupt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideFilter {
    Both,
    SupplyOnly,
    ReturnOnly,
}

impl SideFilter {
    fn applies(self, side: Side) -> bool {
        match self {
            SideFilter::Both => true,
            SideFilter::SupplyOnly => side == Side::Supply,
            SideFilter::ReturnOnly => side == Side::Return,
        }
    }
}

/// Multiplies every sample by `1 + eps`, `eps ~ N(0, rel_std^2)`.
pub fn add_gaussian_noise(data: &MeasurementSet, rel_std: f64, seed: u64) -> MeasurementSet {
    add_gaussian_noise_with(data, rel_std, seed, NoiseMode::Relative, SideFilter::Both)
}

pub fn add_gaussian_noise_with(
    data: &MeasurementSet,
    std: f64,
    seed: u64,
    mode: NoiseMode,
    filter: SideFilter,
) -> MeasurementSet {
    if std == 0.0 {
        return data.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).expect("std must be finite and non-negative");
    data.map_samples(|id, _, v| {
        if !filter.applies(id.side) {
            return v;
        }
        let eps = normal.sample(&mut rng);
        match mode {
            NoiseMode::Relative => v * (1.0 + eps),
            NoiseMode::AbsoluteCelsius => v + eps,
        }
    })
}

/// Salt-and-pepper outliers: each sample independently becomes `a*x` with
/// probability `p/2`, `b*x` with probability `p/2`, and stays `x` otherwise.
pub fn add_salt_pepper(
    data: &MeasurementSet,
    proportion: f64,
    a: f64,
    b: f64,
    seed: u64,
) -> MeasurementSet {
    add_salt_pepper_with(data, proportion, a, b, seed, SideFilter::Both)
}

pub fn add_salt_pepper_with(
    data: &MeasurementSet,
    proportion: f64,
    a: f64,
    b: f64,
    seed: u64,
    filter: SideFilter,
) -> MeasurementSet {
    assert!(
        (0.0..1.0).contains(&proportion),
        "outlier proportion must be in [0, 1)"
    );
    if proportion == 0.0 {
        return data.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = proportion / 2.0;
    data.map_samples(|id, _, v| {
        if !filter.applies(id.side) {
            return v;
        }
        let u: f64 = rng.gen();
        if u < half {
            a * v
        } else if u < proportion {
            b * v
        } else {
            v
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::ChannelId;

    fn sample_set(len: usize) -> MeasurementSet {
        let mut set = MeasurementSet::new(60.0, 0.0);
        set.insert(
            ChannelId::supply("S1"),
            (0..len).map(|t| 80.0 + (t as f64).sin()).collect(),
        )
        .unwrap();
        set.insert(ChannelId::ret("L1"), vec![45.0; len]).unwrap();
        set
    }

    #[test]
    fn zero_std_is_identity() {
        let set = sample_set(32);
        assert_eq!(add_gaussian_noise(&set, 0.0, 7), set);
    }

    #[test]
    fn same_seed_reproduces() {
        let set = sample_set(64);
        let a = add_gaussian_noise(&set, 0.01, 42);
        let b = add_gaussian_noise(&set, 0.01, 42);
        assert_eq!(a, b);
        let c = add_gaussian_noise(&set, 0.01, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_std_matches_request() {
        let mut set = MeasurementSet::new(60.0, 0.0);
        set.insert(ChannelId::supply("S1"), vec![100.0; 100_000])
            .unwrap();
        let noisy = add_gaussian_noise(&set, 0.01, 5);
        let series = noisy.get(&ChannelId::supply("S1")).unwrap();
        let eps: Vec<f64> = series.iter().map(|v| v / 100.0 - 1.0).collect();
        let mean = eps.iter().sum::<f64>() / eps.len() as f64;
        let var = eps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / eps.len() as f64;
        let std = var.sqrt();
        assert!((std - 0.01).abs() < 0.01 * 0.05, "sample std {std}");
    }

    #[test]
    fn salt_pepper_identity_and_ratios() {
        let set = sample_set(16);
        assert_eq!(add_salt_pepper(&set, 0.0, 3.0, 0.3, 1), set);

        let noisy = add_salt_pepper(&set, 0.4, 3.0, 0.3, 1);
        for (id, series) in noisy.iter() {
            let clean = set.get(id).unwrap();
            for (o, c) in series.iter().zip(clean) {
                let ratio = o / c;
                assert!(
                    (ratio - 3.0).abs() < 1e-12
                        || (ratio - 0.3).abs() < 1e-12
                        || (ratio - 1.0).abs() < 1e-12,
                    "unexpected ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn salt_pepper_frequency() {
        let mut set = MeasurementSet::new(60.0, 0.0);
        set.insert(ChannelId::supply("S1"), vec![10.0; 100_000])
            .unwrap();
        let noisy = add_salt_pepper(&set, 0.2, 3.0, 0.3, 11);
        let series = noisy.get(&ChannelId::supply("S1")).unwrap();
        let modified = series.iter().filter(|v| (**v - 10.0).abs() > 1e-9).count();
        let frac = modified as f64 / series.len() as f64;
        assert!((frac - 0.2).abs() < 0.01, "modified fraction {frac}");
    }

    #[test]
    fn side_filter_limits_corruption() {
        let set = sample_set(32);
        let noisy =
            add_gaussian_noise_with(&set, 0.05, 9, NoiseMode::Relative, SideFilter::SupplyOnly);
        assert_eq!(
            noisy.get(&ChannelId::ret("L1")).unwrap(),
            set.get(&ChannelId::ret("L1")).unwrap()
        );
        assert_ne!(
            noisy.get(&ChannelId::supply("S1")).unwrap(),
            set.get(&ChannelId::supply("S1")).unwrap()
        );
    }
}
