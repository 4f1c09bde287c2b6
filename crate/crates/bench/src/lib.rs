//! Shared fixtures for the benchmarks in `benches/`.

use sparse_eb::{simulate, NoiseSpec, Observation, Signal};

/// `p` trailing spikes of height `amplitude` in dimension `n`, observed with unit noise.
pub fn spiky_observation(n: usize, p: usize, amplitude: f64, seed: u64) -> Observation {
    let theta = Signal::spikes(n, p, amplitude).expect("p <= n");
    simulate(&theta, 1.0, &NoiseSpec::GaussianIid, seed).expect("valid noise")
}
