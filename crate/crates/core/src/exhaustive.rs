//! Reference computations by enumerating all `2^n` subsets.
//!
//! Each subset is scored directly from its definition; nothing here touches
//! the sorted reductions or symmetric-polynomial tables used elsewhere. Only
//! meant for small `n` (tests and cross-checks).

use crate::numeric::{complexity_unchecked, log_sum_exp};
use crate::types::{IndexSet, Observation};

/// Largest dimension accepted by the enumerations.
pub const MAX_DIM: usize = 20;

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    assert!(n <= MAX_DIM, "exhaustive enumeration limited to n <= {MAX_DIM}");
    (0u32..(1u32 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// `(minimizing set, value)` of `f` over all subsets; ties keep the earliest
/// enumerated set.
pub fn minimize(n: usize, f: impl Fn(&[usize]) -> f64) -> (IndexSet, f64) {
    let mut best = (Vec::new(), f64::INFINITY);
    for set in subsets(n) {
        let v = f(&set);
        if v < best.1 {
            best = (set, v);
        }
    }
    (IndexSet::from_sorted(best.0), best.1)
}

/// `sum_{i not in I} theta_i^2 + tau sigma^2 |I| log(en/|I|)`, summed in index order.
pub fn tau_rate(set: &[usize], theta: &[f64], sigma: f64, tau: f64) -> f64 {
    let n = theta.len();
    let bias: f64 = (0..n).filter(|i| !set.contains(i)).map(|i| theta[i] * theta[i]).sum();
    bias + tau * sigma * sigma * complexity_unchecked(set.len(), n)
}

/// `-sum_{i in I} X_i^2 + (2 kappa + 1) sigma^2 |I| log(en/|I|)`, summed in index order.
pub fn selection_objective(set: &[usize], x: &Observation, kappa: f64) -> f64 {
    let fit: f64 = set.iter().map(|&i| x.x()[i] * x.x()[i]).sum();
    let s2 = x.sigma() * x.sigma();
    -fit + (2.0 * kappa + 1.0) * s2 * complexity_unchecked(set.len(), x.n())
}

/// Log posterior weight of a subset from the per-coordinate Gaussian factors:
/// for `i in I` the density of `X_i` under `N(X_i, sigma^2 + tau^2)`, otherwise
/// under `N(0, sigma^2)`, times the prior weight `(en/|I|)^{-kappa |I|}`.
pub fn log_joint(set: &[usize], x: &Observation, kappa: f64) -> f64 {
    let n = x.n();
    let k = set.len();
    let s2 = x.sigma() * x.sigma();
    let slab_var = if k == 0 { 0.0 } else { s2 * (std::f64::consts::E * n as f64 / k as f64 - 1.0) };
    let log_two_pi = (2.0 * std::f64::consts::PI).ln();
    let mut total = -kappa * complexity_unchecked(k, n);
    for i in 0..n {
        total += if set.contains(&i) {
            -0.5 * (log_two_pi + (s2 + slab_var).ln())
        } else {
            -0.5 * (log_two_pi + s2.ln()) - x.x()[i] * x.x()[i] / (2.0 * s2)
        };
    }
    total
}

/// Full posterior summaries by enumeration.
#[derive(Debug, Clone)]
pub struct EnumeratedPosterior {
    pub cardinality: Vec<f64>,
    pub inclusion: Vec<f64>,
    pub mean: Vec<f64>,
    pub mode: IndexSet,
}

pub fn posterior(x: &Observation, kappa: f64) -> EnumeratedPosterior {
    let n = x.n();
    let sets: Vec<Vec<usize>> = subsets(n).collect();
    let logs: Vec<f64> = sets.iter().map(|s| log_joint(s, x, kappa)).collect();
    let norm = log_sum_exp(&logs);
    let mut cardinality = vec![0.0; n + 1];
    let mut inclusion = vec![0.0; n];
    let mut mode = (0usize, f64::NEG_INFINITY);
    for (j, (set, l)) in sets.iter().zip(&logs).enumerate() {
        let w = (l - norm).exp();
        cardinality[set.len()] += w;
        for &i in set {
            inclusion[i] += w;
        }
        if *l > mode.1 {
            mode = (j, *l);
        }
    }
    let mean = inclusion.iter().zip(x.x()).map(|(p, v)| p * v).collect();
    EnumeratedPosterior { cardinality, inclusion, mean, mode: IndexSet::from_sorted(sets[mode.0].clone()) }
}
