#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sparse_eb::rng::stream_rng;
use sparse_eb::{Observation, Signal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, &[0xC0FFEE])
}

/// A signal mixing exact zeros, weak and strong entries.
pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal {
    let dense = rng.random_bool(0.3);
    let theta = (0..n)
        .map(|_| {
            if !dense && rng.random_bool(0.6) {
                0.0
            } else {
                let scale = [0.3, 1.0, 3.0, 6.0][rng.random_range(0..4)];
                scale * rng.random_range(-1.0..1.0)
            }
        })
        .collect();
    Signal::new(theta).unwrap()
}

pub fn random_observation(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> (Signal, Observation) {
    let theta = random_signal(rng, n);
    let x = theta
        .theta()
        .iter()
        .map(|t| t + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect();
    (theta, Observation::new(x, sigma).unwrap())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
