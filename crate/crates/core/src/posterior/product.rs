//! Coordinatewise posterior under the product-form prior with a fixed slab
//! variance factor `K` and per-coordinate inclusion weight `n^-kappa`.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::Result;
use crate::types::{check_positive, Observation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductPosterior {
    pub inclusion: Vec<f64>,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
}

/// `p_i = 1 / (1 + h exp(-X_i^2 / (2 sigma^2)))` with `h = n^kappa sqrt(K + 1)`,
/// the mean `p_i X_i`, and the median of `p_i N(X_i, K sigma^2/(K+1)) + (1 - p_i) delta_0`.
pub fn product_posterior(x: &Observation, kappa: f64, k_factor: f64) -> Result<ProductPosterior> {
    check_positive("kappa", kappa)?;
    check_positive("K", k_factor)?;
    let n = x.n() as f64;
    let sigma = x.sigma();
    let log_h = kappa * n.ln() + 0.5 * (k_factor + 1.0).ln();
    let slab_sd = sigma * (k_factor / (k_factor + 1.0)).sqrt();

    let inclusion: Vec<f64> = x
        .x()
        .iter()
        .map(|v| {
            let z = v * v / (2.0 * sigma * sigma) - log_h;
            1.0 / (1.0 + (-z).exp())
        })
        .collect();
    let mean = inclusion.iter().zip(x.x()).map(|(p, v)| p * v).collect();
    let median = inclusion
        .iter()
        .zip(x.x())
        .map(|(&p, &v)| mixture_median(p, v, slab_sd))
        .collect();
    Ok(ProductPosterior { inclusion, mean, median })
}

/// Median of `p N(mu, sd^2) + (1 - p) delta_0`.
///
/// The CDF jumps by `1 - p` at zero. If the Gaussian mass below zero already
/// exceeds 1/2 the median is negative; if everything up to and including the
/// atom stays below 1/2 it is positive; otherwise it is the atom.
pub(crate) fn mixture_median(p: f64, mu: f64, sd: f64) -> f64 {
    let std = Normal::standard();
    let below = p * std.cdf(-mu / sd);
    if below > 0.5 {
        mu + sd * std.inverse_cdf(0.5 / p)
    } else if below + (1.0 - p) < 0.5 {
        mu + sd * std.inverse_cdf(1.0 - 0.5 / p)
    } else {
        0.0
    }
}
