//! Domain types: observations, signals, index sets, prior settings.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Theory bound on `kappa` under Gaussian noise.
pub const NORMAL_KAPPA_BAR: f64 = 3.24;

/// A noisy observation `x_i = theta_i + sigma * xi_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    x: Vec<f64>,
    sigma: f64,
}

impl Observation {
    pub fn new(x: Vec<f64>, sigma: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::config("observation must have n >= 1"));
        }
        check_sigma(sigma)?;
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("x_{} is not finite", i + 1)));
        }
        Ok(Self { x, sigma })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// The same data with `x` and `sigma` both multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.x.iter().map(|v| v * c).collect(), self.sigma * c)
    }

    pub fn into_inner(self) -> (Vec<f64>, f64) {
        (self.x, self.sigma)
    }
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!("sigma must be positive and finite, got {sigma}")))
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must be positive and finite, got {v}")))
    }
}

/// The unknown mean vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Signal {
    theta: Vec<f64>,
}

impl Signal {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("theta_{} is not finite", i + 1)));
        }
        Ok(Self { theta })
    }

    pub fn zeros(n: usize) -> Self {
        Self { theta: vec![0.0; n] }
    }

    /// `(0, …, 0, A, …, A)` with the last `p` entries equal to `amplitude`.
    pub fn spikes(n: usize, p: usize, amplitude: f64) -> Result<Self> {
        if p > n {
            return Err(Error::domain(format!("p={p} exceeds n={n}")));
        }
        let mut theta = vec![0.0; n];
        theta[n - p..].fill(amplitude);
        Self::new(theta)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// Active set `{i : theta_i != 0}`.
    pub fn support(&self) -> IndexSet {
        IndexSet::from_sorted(
            self.theta
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    /// Sparsity `s(theta)`.
    pub fn sparsity(&self) -> usize {
        self.theta.iter().filter(|v| **v != 0.0).count()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.theta
    }
}

/// A sorted set of coordinate indices.
///
/// Held 0-based in memory; serialized 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn from_unsorted(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    /// The first `k` entries of a magnitude order, as a set.
    pub fn top(order: &[usize], k: usize) -> Self {
        Self::from_unsorted(order[..k].to_vec())
    }

    /// From 1-based indices, checked against dimension `n`.
    pub fn from_one_based(indices: &[usize], n: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            if i == 0 || i > n {
                return Err(Error::domain(format!("index {i} outside 1..={n}")));
            }
            out.push(i - 1);
        }
        Ok(Self::from_unsorted(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// Membership mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.0 {
            m[i] = true;
        }
        m
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|i| i + 1))
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(d)?;
        if raw.contains(&0) {
            return Err(serde::de::Error::custom("index sets are 1-based"));
        }
        Ok(Self::from_unsorted(raw.into_iter().map(|i| i - 1).collect()))
    }
}

fn default_kappa() -> f64 {
    0.7
}

/// Prior settings: the cardinality-penalty weight `kappa` and, for the
/// product-prior variant, a fixed slab variance factor `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_variance_factor: Option<f64>,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self { kappa: default_kappa(), product_variance_factor: None }
    }
}

impl PriorConfig {
    pub fn new(kappa: f64) -> Result<Self> {
        let cfg = Self { kappa, product_variance_factor: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("kappa", self.kappa)?;
        if let Some(k) = self.product_variance_factor {
            check_positive("product_variance_factor", k)?;
        }
        Ok(())
    }

    /// Whether `kappa` exceeds the Gaussian-noise theory bound 3.24.
    /// Smaller values are allowed (0.7 is the usual simulation choice).
    pub fn meets_normal_theory_bound(&self) -> bool {
        self.kappa > NORMAL_KAPPA_BAR
    }
}
