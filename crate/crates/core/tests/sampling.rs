//! Draws from the exact sampler against the exact marginals.

mod common;

use common::rng;
use rand::Rng;
use sparse_eb::{exhaustive, posterior, Observation};

#[test]
fn subset_frequencies_match_enumeration() {
    let x = Observation::new(vec![2.9, -0.4, 1.7, 0.0, -3.6, 1.1], 1.0).unwrap();
    let post = posterior::build(&x, 0.7).unwrap();
    let sampler = post.sampler(&x).unwrap();
    let mut rng = rng(31);
    let draws = 200_000;
    let mut counts = vec![0usize; 1 << x.n()];
    for _ in 0..draws {
        let set = sampler.draw_subset(&mut rng);
        counts[set.iter().map(|i| 1usize << i).sum::<usize>()] += 1;
    }
    // Exact subset probabilities from the log weights.
    let weights: Vec<f64> = (0..counts.len())
        .map(|mask| {
            let set = sparse_eb::IndexSet::from_sorted((0..x.n()).filter(|i| mask >> i & 1 == 1).collect());
            posterior::subset_log_weight(&set, &x, 0.7).unwrap()
        })
        .collect();
    let norm = sparse_eb::log_sum_exp(&weights);
    for (mask, &c) in counts.iter().enumerate() {
        let p = (weights[mask] - norm).exp();
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        let freq = c as f64 / draws as f64;
        assert!((freq - p).abs() <= 5.0 * se + 1e-6, "mask {mask:06b}: {freq} vs {p}");
    }
}

#[test]
fn draw_values_have_posterior_mean() {
    let mut rng = rng(32);
    let x: Vec<f64> = (0..8).map(|i| if i < 3 { 4.0 } else { rng.random_range(-1.5..1.5) }).collect();
    let x = Observation::new(x, 1.0).unwrap();
    let brute = exhaustive::posterior(&x, 0.7);
    let post = posterior::build(&x, 0.7).unwrap();
    let draws = post.sample(&x, 9, 100_000).unwrap();
    for i in 0..x.n() {
        let mean = draws.iter().map(|d| d.value[i]).sum::<f64>() / draws.len() as f64;
        // The draw variance is bounded by x_i^2/4 + sigma^2.
        let sd = (x.x()[i].powi(2) / 4.0 + 1.0).sqrt() / (draws.len() as f64).sqrt();
        assert!((mean - brute.mean[i]).abs() < 5.0 * sd, "coordinate {i}: {mean} vs {}", brute.mean[i]);
    }
}

#[test]
fn sampling_is_reproducible() {
    let x = Observation::new(vec![3.0, 0.2, -2.5, 0.9], 0.8).unwrap();
    let post = posterior::build(&x, 0.7).unwrap();
    let a = post.sample(&x, 5, 100).unwrap();
    let b = post.sample(&x, 5, 100).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, post.sample(&x, 6, 100).unwrap());
}
