//! Penalized subset selection, the hard-thresholding estimate and the
//! data-driven radius.
//!
//! The selector minimizes `-sum_{i in I} X_i^2 + (2 kappa + 1) sigma^2 |I| log(en/|I|)`.
//! Subtracting the constant `sum X_i^2` gives `crit(k)`, the sum of the `n - k`
//! smallest squares plus the penalty, minimized over `k` alone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{argmin_first, complexity_unchecked, order_by_magnitude, tail_square_sums};
use crate::types::{check_positive, IndexSet, Observation, Signal};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSelection {
    pub selected: IndexSet,
    #[serde(rename = "k_hat")]
    pub cardinality: usize,
    /// `|X_[k_hat]|`, the smallest selected magnitude (0 when nothing is selected).
    pub threshold: f64,
    pub radius_sq: f64,
    #[serde(rename = "criterion_curve")]
    pub criterion_values: Vec<f64>,
}

fn penalty_weight(x: &Observation, kappa: f64) -> f64 {
    (2.0 * kappa + 1.0) * x.sigma() * x.sigma()
}

/// `crit(k, X)`.
pub fn criterion(k: usize, x: &Observation, kappa: f64) -> Result<f64> {
    check_positive("kappa", kappa)?;
    let n = x.n();
    if k > n {
        return Err(Error::domain(format!("k={k} outside 0..={n}")));
    }
    let order = order_by_magnitude(x.x());
    let tail = tail_square_sums(x.x(), &order);
    Ok(tail[k] + penalty_weight(x, kappa) * complexity_unchecked(k, n))
}

/// Minimizes `crit` over all cardinalities (smallest `k` on ties) and keeps
/// the `k_hat` largest magnitudes.
pub fn select(x: &Observation, kappa: f64) -> Result<SubsetSelection> {
    check_positive("kappa", kappa)?;
    let n = x.n();
    let order = order_by_magnitude(x.x());
    let tail = tail_square_sums(x.x(), &order);
    let weight = penalty_weight(x, kappa);
    let criterion_values: Vec<f64> =
        (0..=n).map(|k| tail[k] + weight * complexity_unchecked(k, n)).collect();
    let (k_hat, _) = argmin_first(0..=n, |k| criterion_values[k]);
    let threshold = if k_hat == 0 { 0.0 } else { x.x()[order[k_hat - 1]].abs() };
    Ok(SubsetSelection {
        selected: IndexSet::top(&order, k_hat),
        cardinality: k_hat,
        threshold,
        radius_sq: radius_sq_for(k_hat, x.sigma(), n),
        criterion_values,
    })
}

/// `X` on the selected set, zero elsewhere.
pub fn hard_threshold_estimate(x: &Observation, kappa: f64) -> Result<Signal> {
    let sel = select(x, kappa)?;
    Ok(restrict(x, &sel.selected))
}

/// `X(I)`: the observation restricted to `set`.
pub fn restrict(x: &Observation, set: &IndexSet) -> Signal {
    let mut out = vec![0.0; x.n()];
    for i in set.iter() {
        out[i] = x.x()[i];
    }
    Signal::new(out).expect("finite observation")
}

/// `sigma^2 (1 + |I| log(en/|I|))` for the selection.
pub fn radius_sq(sel: &SubsetSelection, sigma: f64, n: usize) -> Result<f64> {
    if sel.cardinality > n {
        return Err(Error::domain(format!("k_hat={} exceeds n={n}", sel.cardinality)));
    }
    crate::types::check_sigma(sigma)?;
    Ok(radius_sq_for(sel.cardinality, sigma, n))
}

pub(crate) fn radius_sq_for(k: usize, sigma: f64, n: usize) -> f64 {
    sigma * sigma * (1.0 + complexity_unchecked(k, n))
}
