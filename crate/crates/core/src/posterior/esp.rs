//! Elementary symmetric polynomials of positive weights, in log domain.
//!
//! All recursions only ever add nonnegative terms, so there is no
//! cancellation regardless of how the weights are spread.

use crate::numeric::log_add;

/// `log e_j(a)` for `j = 0..=n`, via `e_j <- e_j + a_i e_{j-1}`.
pub(crate) fn log_esp(log_a: &[f64]) -> Vec<f64> {
    let n = log_a.len();
    let mut e = vec![f64::NEG_INFINITY; n + 1];
    e[0] = 0.0;
    for (i, &la) in log_a.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] = log_add(e[j], la + e[j - 1]);
        }
    }
    e
}

/// `log e_k(a) = T_k + r_k`, where `T_k` is the sum of the `k` largest log
/// weights. Returns the weights sorted in decreasing order and the residuals
/// `r_k`.
///
/// Folding the weights in decreasing order, `e_k <- e_k + a_t e_{k-1}` becomes
/// `r_k <- log_add(r_k, (log a_t - log a_(k)) + r_{k-1})`. Only differences of
/// input weights appear, so the residuals stay accurate when the weights
/// themselves are huge (|X|/sigma in the thousands puts `T_k` near 1e6 and
/// beyond, where one ulp is already ~1e-10).
pub(crate) fn top_k_residuals(log_a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut sorted = log_a.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len();
    let mut r = vec![f64::NEG_INFINITY; n + 1];
    r[0] = 0.0;
    for (i, &t) in sorted.iter().enumerate() {
        r[i + 1] = r[i];
        for k in (1..=i).rev() {
            r[k] = log_add(r[k], (t - sorted[k - 1]) + r[k - 1]);
        }
    }
    (sorted, r)
}

/// A square `(n+1) x (n+1)` table of log-ESP values over a family of sub-sequences.
#[derive(Debug, Clone)]
pub(crate) struct EspTable {
    stride: usize,
    data: Vec<f64>,
}

impl EspTable {
    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.stride + j]
    }

    /// Row `i` holds `log e_j(a_0, …, a_{i-1})`.
    pub(crate) fn prefix(log_a: &[f64]) -> Self {
        let n = log_a.len();
        let stride = n + 1;
        let mut data = vec![f64::NEG_INFINITY; stride * stride];
        data[0] = 0.0;
        for i in 0..n {
            let (prev, next) = data[i * stride..(i + 2) * stride].split_at_mut(stride);
            next[0] = 0.0;
            let la = log_a[i];
            for j in 1..=i + 1 {
                next[j] = log_add(prev[j], la + prev[j - 1]);
            }
        }
        Self { stride, data }
    }

    /// Row `i` holds `log e_j(a_i, …, a_{n-1})`; row `n` is the empty sequence.
    pub(crate) fn suffix(log_a: &[f64]) -> Self {
        let n = log_a.len();
        let stride = n + 1;
        let mut data = vec![f64::NEG_INFINITY; stride * stride];
        data[n * stride] = 0.0;
        for i in (0..n).rev() {
            let (cur, next) = data[i * stride..(i + 2) * stride].split_at_mut(stride);
            cur[0] = 0.0;
            let la = log_a[i];
            for j in 1..=n - i {
                cur[j] = log_add(next[j], la + next[j - 1]);
            }
        }
        Self { stride, data }
    }
}
