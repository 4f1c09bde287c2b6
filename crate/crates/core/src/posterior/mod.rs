//! Exact empirical Bayes subset posterior.
//!
//! With the slab means set to the data, the posterior weight of a subset `I`
//! of size `k` is proportional to
//!
//! ```text
//! w(I) = G_k * prod_{i in I} a_i,   a_i = exp(X_i^2 / (2 sigma^2)),
//! G_k  = exp(-(kappa + 1/2) k log(en/k)).
//! ```
//!
//! Summing over subsets of each size gives `G_k e_k(a)`, where `e_k` is the
//! k-th elementary symmetric polynomial, so the cardinality law, the marginal
//! inclusion probabilities and exact draws all come out of a few `O(n^2)`
//! log-domain tables instead of a `2^n` enumeration.

mod esp;
mod product;
mod sampling;

pub use product::{product_posterior, ProductPosterior};
pub use sampling::{PosteriorDraw, PosteriorSampler};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{complexity_unchecked, log_sum_exp};
use crate::types::{check_positive, IndexSet, Observation, Signal};
use esp::EspTable;

/// How marginal inclusion probabilities are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InclusionMethod {
    /// Forward-backward pass over prefix tables and a backward message,
    /// `O(n^2)` in total.
    #[default]
    ForwardBackward,
    /// A fresh symmetric-polynomial recursion without coordinate `i` for every
    /// `i`, `O(n^3)` in total. Kept as an independent cross-check.
    LeaveOneOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetPosterior {
    pub kappa: f64,
    pub sigma: f64,
    /// `X_i^2 / (2 sigma^2)`.
    pub log_a: Vec<f64>,
    /// `-(kappa + 1/2) k log(en/k)` for `k = 0..=n`.
    pub log_g: Vec<f64>,
    /// `log e_k(a)` for `k = 0..=n`.
    pub log_esp: Vec<f64>,
    /// Normalized `log q_k`.
    pub log_cardinality_posterior: Vec<f64>,
    pub cardinality_posterior: Vec<f64>,
    pub inclusion: Vec<f64>,
    /// `sigma sqrt(K_n(k) / (K_n(k) + 1))`, the slab standard deviation given
    /// `|I| = k` (0 at `k = 0`).
    pub conditional_sd: Vec<f64>,
    #[serde(skip)]
    suffix: EspTable,
}

/// Unnormalized log posterior weight of `set`:
/// `-(kappa + 1/2)|I| log(en/|I|) + sum_{i in I} X_i^2 / (2 sigma^2)`.
pub fn subset_log_weight(set: &IndexSet, x: &Observation, kappa: f64) -> Result<f64> {
    check_positive("kappa", kappa)?;
    let n = x.n();
    if set.iter().any(|i| i >= n) {
        return Err(Error::domain(format!("index set not contained in 1..={n}")));
    }
    let s2 = 2.0 * x.sigma() * x.sigma();
    let data: f64 = set.iter().map(|i| x.x()[i] * x.x()[i] / s2).sum();
    Ok(-(kappa + 0.5) * complexity_unchecked(set.len(), n) + data)
}

/// Builds the posterior with the default inclusion method.
pub fn build(x: &Observation, kappa: f64) -> Result<SubsetPosterior> {
    build_with(x, kappa, InclusionMethod::default())
}

pub fn build_with(x: &Observation, kappa: f64, method: InclusionMethod) -> Result<SubsetPosterior> {
    check_positive("kappa", kappa)?;
    let n = x.n();
    let sigma = x.sigma();
    let s2 = 2.0 * sigma * sigma;
    let log_a: Vec<f64> = x.x().iter().map(|v| v * v / s2).collect();
    if let Some(i) = log_a.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "X_{}^2 / (2 sigma^2) overflows double precision",
            i + 1
        )));
    }

    let log_g: Vec<f64> =
        (0..=n).map(|k| -(kappa + 0.5) * complexity_unchecked(k, n)).collect();
    let suffix = EspTable::suffix(&log_a);
    let (sorted, residual) = esp::top_k_residuals(&log_a);
    let mut log_esp = Vec::with_capacity(n + 1);
    let mut top = 0.0;
    for k in 0..=n {
        if k > 0 {
            top += sorted[k - 1];
        }
        log_esp.push(top + residual[k]);
    }

    let unnormalized: Vec<f64> = log_g.iter().zip(&log_esp).map(|(g, e)| g + e).collect();
    if !log_sum_exp(&unnormalized).is_finite() {
        return Err(Error::Numeric("posterior normalizing constant is not finite".into()));
    }
    let log_q = normalized_cardinality(&log_g, &sorted, &residual, &unnormalized);
    let q: Vec<f64> = log_q.iter().map(|l| l.exp()).collect();

    let inclusion = match method {
        InclusionMethod::ForwardBackward => inclusion_forward_backward(&log_a, &log_q, &log_esp),
        InclusionMethod::LeaveOneOut => inclusion_leave_one_out(&log_a, &log_q, &log_esp),
    };

    let en = std::f64::consts::E * n as f64;
    let conditional_sd = (0..=n)
        .map(|k| if k == 0 { 0.0 } else { sigma * (1.0 - k as f64 / en).sqrt() })
        .collect();

    Ok(SubsetPosterior {
        kappa,
        sigma,
        log_a,
        log_g,
        log_esp,
        log_cardinality_posterior: log_q,
        cardinality_posterior: q,
        inclusion,
        conditional_sd,
        suffix,
    })
}

/// `log q_k`, measured from the mode `k*` of the rough weights so that only
/// sums of weights between `k*` and `k` enter: `log(q_k / q_k*)` is
/// `G_k - G_k* + (T_k - T_k*) + r_k - r_k*` with `T_k - T_k*` summed directly.
fn normalized_cardinality(log_g: &[f64], sorted: &[f64], residual: &[f64], rough: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    let (mode, _) = crate::numeric::argmin_first(0..=n, |k| -rough[k]);
    let mut rel = vec![0.0; n + 1];
    let mut top = 0.0;
    for k in mode + 1..=n {
        top += sorted[k - 1];
        rel[k] = (log_g[k] - log_g[mode]) + top + (residual[k] - residual[mode]);
    }
    top = 0.0;
    for k in (0..mode).rev() {
        top -= sorted[k];
        rel[k] = (log_g[k] - log_g[mode]) + top + (residual[k] - residual[mode]);
    }
    let norm = log_sum_exp(&rel);
    rel.iter().map(|v| v - norm).collect()
}

/// `p_i = sum_k q_k a_i e_{k-1}(a_{-i}) / e_k(a)`.
///
/// Writing `e_{k-1}(a_{-i}) = sum_c e_c(a_{<i}) e_{k-1-c}(a_{>i})` and
/// `w_k = q_k / e_k(a)`, the inner sum over `k` is a backward message
/// `B_{i+1}(c+1) = sum_k w_k e_{k-1-c}(a_{>i})` with
/// `B_i(c) = B_{i+1}(c) + a_i B_{i+1}(c+1)`.
fn inclusion_forward_backward(log_a: &[f64], log_q: &[f64], log_esp: &[f64]) -> Vec<f64> {
    let n = log_a.len();
    let prefix = EspTable::prefix(log_a);
    let mut backward: Vec<f64> = log_q.iter().zip(log_esp).map(|(q, e)| q - e).collect();
    let mut next = vec![f64::NEG_INFINITY; n + 1];
    let mut inclusion = vec![0.0; n];
    let mut terms = Vec::with_capacity(n + 1);
    for i in (0..n).rev() {
        // `backward` is B_{i+1}.
        // Inclusion and exclusion masses add to one; normalizing their ratio
        // cancels the rounding in the shared log offsets.
        let pre = prefix.row(i);
        terms.clear();
        terms.extend((0..=i).map(|c| pre[c] + backward[c + 1]));
        let log_in = log_a[i] + log_sum_exp(&terms);
        terms.clear();
        terms.extend((0..=i).map(|c| pre[c] + backward[c]));
        let log_out = log_sum_exp(&terms);
        inclusion[i] = logistic(log_in - log_out);

        for c in 0..=n {
            let shifted = if c < n { log_a[i] + backward[c + 1] } else { f64::NEG_INFINITY };
            next[c] = crate::numeric::log_add(backward[c], shifted);
        }
        std::mem::swap(&mut backward, &mut next);
    }
    inclusion
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn inclusion_leave_one_out(log_a: &[f64], log_q: &[f64], log_esp: &[f64]) -> Vec<f64> {
    let n = log_a.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let others: Vec<f64> =
                log_a.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            let loo = esp::log_esp(&others);
            let terms: Vec<f64> =
                (1..=n).map(|k| log_q[k] + log_a[i] + loo[k - 1] - log_esp[k]).collect();
            log_sum_exp(&terms).min(0.0).exp()
        })
        .collect()
}

impl SubsetPosterior {
    pub fn n(&self) -> usize {
        self.log_a.len()
    }

    /// `sum_k k q_k`.
    pub fn expected_cardinality(&self) -> f64 {
        self.cardinality_posterior.iter().enumerate().map(|(k, q)| k as f64 * q).sum()
    }

    /// Posterior mass on `{I : |I| > bound}`.
    pub fn mass_above(&self, bound: f64) -> f64 {
        self.cardinality_posterior
            .iter()
            .enumerate()
            .filter(|(k, _)| *k as f64 > bound)
            .map(|(_, q)| q)
            .sum()
    }

    pub(crate) fn suffix(&self) -> &EspTable {
        &self.suffix
    }

    pub(crate) fn check_matches(&self, x: &Observation) -> Result<()> {
        if x.n() != self.n() || x.sigma() != self.sigma {
            return Err(Error::domain("observation does not match the posterior"));
        }
        Ok(())
    }

    pub fn sampler<'a>(&'a self, x: &'a Observation) -> Result<PosteriorSampler<'a>> {
        PosteriorSampler::new(self, x)
    }

    /// `count` draws from the stream keyed by `seed`.
    pub fn sample(&self, x: &Observation, seed: u64, count: usize) -> Result<Vec<PosteriorDraw>> {
        if count == 0 {
            return Err(Error::domain("count must be at least 1"));
        }
        let sampler = self.sampler(x)?;
        let mut rng = crate::rng::stream_rng(seed, &[]);
        Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
    }
}

/// Posterior mean `(p_i X_i)`.
pub fn shrinkage_mean(post: &SubsetPosterior, x: &Observation) -> Result<Signal> {
    post.check_matches(x)?;
    Signal::new(post.inclusion.iter().zip(x.x()).map(|(p, v)| p * v).collect())
}
