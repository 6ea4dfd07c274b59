//! Helpers shared by the integration suites: fixture loading, boundary
//! signal generation, and dataset synthesis.

use dhn_core::measurements::MeasurementSet;
use dhn_core::network::{
    build_network, simulate, BoundaryConditions, NetworkConfig, NetworkModel,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> NetworkModel {
    let raw = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    let config = NetworkConfig::from_json(&raw).expect("fixture parses");
    build_network(&config).expect("fixture is valid")
}

/// Mean-reverting random walk around `base`, the excitation used for
/// identification datasets.
pub fn excitation(len: usize, base: f64, step_std: f64, reversion: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len);
    let mut state = base;
    for _ in 0..len {
        let eps: f64 = rng.gen_range(-1.0..1.0) * step_std * 3.0f64.sqrt();
        state = base + reversion * (state - base) + eps;
        out.push(state);
    }
    out
}

/// Simulates rich boundary signals on a network and discards the warm-up
/// transient, leaving `len` clean steps.
pub fn synth_dataset(network: &NetworkModel, len: usize, warmup: usize, seed: u64) -> MeasurementSet {
    let horizon = len + warmup;
    let mut boundaries = BoundaryConditions::default();
    for (i, name) in network.source_names().into_iter().enumerate() {
        boundaries.source_supply.insert(
            name,
            excitation(horizon, 85.0, 1.5, 0.9, seed.wrapping_add(1000 + i as u64)),
        );
    }
    for (i, name) in network.load_names().into_iter().enumerate() {
        boundaries.load_return.insert(
            name,
            excitation(horizon, 45.0, 1.0, 0.9, seed.wrapping_add(2000 + i as u64)),
        );
    }
    let data = simulate(network, &boundaries, horizon, 70.0).expect("simulation succeeds");
    data.discard_warmup(warmup).expect("enough samples")
}
