//! Log-domain primitives and the ordering convention shared by every module.

use crate::error::{Error, Result};

/// `log(exp(a) + exp(b))` without overflow. Either argument may be `-inf`.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `log Σ exp(t_i)` using max-subtraction. Returns `-inf` for an empty slice
/// or when every term is `-inf`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// `k·log(en/k)` with `0·log(a/0) = 0`.
///
/// This is the complexity of a size-`k` subset of `{1..n}`; it is 0 at `k = 0`,
/// equals `n` at `k = n` and is strictly increasing in between.
pub fn complexity_term(k: usize, n: usize) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!(
            "cardinality k={k} exceeds dimension n={n}"
        )));
    }
    Ok(complexity_unchecked(k, n))
}

#[inline]
pub(crate) fn complexity_unchecked(k: usize, n: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        let k = k as f64;
        k * (1.0 + (n as f64 / k).ln())
    }
}

/// Indices (0-based) sorted by decreasing `|v_i|`, ties broken by ascending index.
pub fn order_by_magnitude(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx
}

/// `tail[k]` = sum of the `n - k` smallest squares of `v` (taken along `order`),
/// for `k = 0..=n`. Accumulates from the smallest term upward.
pub(crate) fn tail_square_sums(v: &[f64], order: &[usize]) -> Vec<f64> {
    let n = v.len();
    let mut tail = vec![0.0; n + 1];
    for k in (0..n).rev() {
        let x = v[order[k]];
        tail[k] = tail[k + 1] + x * x;
    }
    tail
}

/// Smallest minimizer of `f` over `ks`.
pub(crate) fn argmin_first(ks: impl Iterator<Item = usize>, f: impl Fn(usize) -> f64) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for k in ks {
        let value = f(k);
        if best.0 == usize::MAX || value < best.1 {
            best = (k, value);
        }
    }
    best
}
