//! Oracle benchmarks of a known signal: tau-rates, tau-oracles, the R-oracle,
//! restricted oracles and the excessive bias ratio.
//!
//! At fixed cardinality `k` every rate below is minimized by the `k`
//! largest-magnitude coordinates, so each search is a scan over `k = 0..=n`
//! after one sort. Ties between cardinalities go to the smallest `k`; ties in
//! magnitude follow [`order_by_magnitude`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{argmin_first, complexity_unchecked, order_by_magnitude, tail_square_sums};
use crate::types::{check_positive, check_sigma, IndexSet, Signal};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub tau: f64,
    pub oracle_set: IndexSet,
    pub oracle_cardinality: usize,
    pub rate_sq: f64,
    /// Excessive tau-bias: squared mass left outside the oracle set.
    pub bias_part: f64,
    /// `tau * sigma^2 * |I| log(en/|I|)`.
    pub variance_part: f64,
    pub ebr_ratio: f64,
}

/// `sum_{i not in I} theta_i^2 + tau sigma^2 |I| log(en/|I|)`.
pub fn tau_rate(set: &IndexSet, theta: &Signal, sigma: f64, tau: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_positive("tau", tau)?;
    let n = theta.n();
    if set.iter().any(|i| i >= n) {
        return Err(Error::domain(format!("index set not contained in 1..={n}")));
    }
    let mask = set.mask(n);
    let bias: f64 = theta
        .theta()
        .iter()
        .zip(&mask)
        .filter(|(_, inside)| !**inside)
        .map(|(t, _)| t * t)
        .sum();
    Ok(bias + tau * sigma * sigma * complexity_unchecked(set.len(), n))
}

/// The tau-oracle over all subsets.
pub fn tau_oracle(theta: &Signal, sigma: f64, tau: f64) -> Result<OracleReport> {
    restricted_tau_oracle(theta, sigma, tau, 0)
}

/// The tau-oracle over subsets of cardinality at least `k_min`.
pub fn restricted_tau_oracle(
    theta: &Signal,
    sigma: f64,
    tau: f64,
    k_min: usize,
) -> Result<OracleReport> {
    check_sigma(sigma)?;
    check_positive("tau", tau)?;
    let n = theta.n();
    if k_min > n {
        return Err(Error::domain(format!("k_min={k_min} exceeds n={n}")));
    }
    let order = order_by_magnitude(theta.theta());
    let tail = tail_square_sums(theta.theta(), &order);
    let s2 = sigma * sigma;
    let (k, _) = argmin_first(k_min..=n, |k| tail[k] + tau * s2 * complexity_unchecked(k, n));

    let complexity = complexity_unchecked(k, n);
    let bias_part = tail[k];
    let variance_part = tau * s2 * complexity;
    Ok(OracleReport {
        tau,
        oracle_set: IndexSet::top(&order, k),
        oracle_cardinality: k,
        rate_sq: bias_part + variance_part,
        bias_part,
        variance_part,
        ebr_ratio: bias_part / (s2 + s2 * complexity),
    })
}

/// The R-oracle: minimizer of `sum_{i not in I} theta_i^2 + sigma^2 |I|`.
pub fn r_oracle(theta: &Signal, sigma: f64) -> Result<(IndexSet, f64)> {
    check_sigma(sigma)?;
    let n = theta.n();
    let order = order_by_magnitude(theta.theta());
    let tail = tail_square_sums(theta.theta(), &order);
    let s2 = sigma * sigma;
    let (k, rate) = argmin_first(0..=n, |k| tail[k] + s2 * k as f64);
    Ok((IndexSet::top(&order, k), rate))
}

/// Membership in the class `{theta : b_tau(theta) <= t}`.
pub fn ebr_member(theta: &Signal, sigma: f64, tau: f64, t: f64) -> Result<bool> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    Ok(tau_oracle(theta, sigma, tau)?.ebr_ratio <= t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tau_rate_examples() {
        let theta = sig(&[1.0, 2.0]);
        assert_eq!(tau_rate(&IndexSet::empty(), &theta, 1.0, 1.0).unwrap(), 5.0);
        let full = IndexSet::from_sorted(vec![0, 1]);
        assert!((tau_rate(&full, &theta, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);

        let spikes = Signal::spikes(500, 25, 5.0).unwrap();
        let r = tau_rate(&spikes.support(), &spikes, 1.0, 1.0).unwrap();
        assert!((r - 25.0 * (1.0 + 20f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn zero_signal_has_empty_oracle() {
        let rep = tau_oracle(&Signal::zeros(7), 1.0, 1.0).unwrap();
        assert!(rep.oracle_set.is_empty());
        assert_eq!(rep.rate_sq, 0.0);
        assert_eq!(rep.ebr_ratio, 0.0);
    }

    #[test]
    fn spike_design_oracle_is_support() {
        let theta = Signal::spikes(500, 25, 5.0).unwrap();
        let rep = tau_oracle(&theta, 1.0, 1.0).unwrap();
        assert_eq!(rep.oracle_set, theta.support());
        assert!((rep.rate_sq - 99.893_306_8).abs() < 1e-6);
        assert_eq!(rep.ebr_ratio, 0.0);
        assert!((rep.rate_sq - rep.bias_part - rep.variance_part).abs() <= 1e-12 * rep.rate_sq);
    }

    #[test]
    fn r_oracle_examples() {
        assert_eq!(r_oracle(&Signal::zeros(3), 1.0).unwrap(), (IndexSet::empty(), 0.0));
        let (set, rate) = r_oracle(&sig(&[2.0, 0.0]), 1.0).unwrap();
        assert_eq!((set.one_based(), rate), (vec![1], 1.0));
        let (set, rate) = r_oracle(&sig(&[0.5, 0.0]), 1.0).unwrap();
        assert_eq!((set.one_based(), rate), (vec![], 0.25));
    }

    #[test]
    fn restricted_forces_cardinality() {
        let rep = restricted_tau_oracle(&Signal::zeros(500), 1.0, 1.0, 1).unwrap();
        assert_eq!(rep.oracle_cardinality, 1);
        assert!((rep.rate_sq - (500f64 * std::f64::consts::E).ln()).abs() < 1e-12);
        assert!(restricted_tau_oracle(&Signal::zeros(5), 1.0, 1.0, 6).is_err());
    }

    #[test]
    fn ebr_subthreshold_signal() {
        // Five coordinates of 0.5: each costs 0.25 but the cheapest inclusion
        // costs log(e*50) > 4, so the oracle is empty and b = sum theta^2 / sigma^2.
        let mut v = vec![0.0; 50];
        v[..5].fill(0.5);
        let theta = sig(&v);
        let rep = tau_oracle(&theta, 1.0, 1.0).unwrap();
        assert_eq!(rep.oracle_cardinality, 0);
        assert!((rep.ebr_ratio - 1.25).abs() < 1e-15);
        assert!(ebr_member(&theta, 1.0, 1.0, 1.25).unwrap());
        assert!(!ebr_member(&theta, 1.0, 1.0, 1.2).unwrap());
        assert!(ebr_member(&Signal::zeros(4), 1.0, 1.0, 0.0).unwrap());
        assert!(ebr_member(&theta, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn cross_cardinality_tie_goes_to_smallest() {
        // n = 1: rate(∅) = theta^2, rate({1}) = tau sigma^2. Equal at theta = 1.
        let rep = tau_oracle(&sig(&[1.0]), 1.0, 1.0).unwrap();
        assert_eq!(rep.oracle_cardinality, 0);
    }
}
