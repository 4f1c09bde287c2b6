//! Noise families and data simulation.
//!
//! Every family is normalized to unit variance (or variance at most one for
//! `uniform-bounded` with a smaller bound), so `sigma` is the noise scale.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::types::{check_sigma, Observation, Signal};

/// Distribution of the standardized errors `xi_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseSpec {
    /// i.i.d. standard normal.
    #[default]
    GaussianIid,
    /// i.i.d. uniform on `[-bound, bound]`; `bound <= sqrt(3)` keeps the variance at most one.
    UniformBounded {
        #[serde(default = "sqrt3")]
        bound: f64,
    },
    /// i.i.d. random signs.
    Rademacher,
    /// Student-t with `df > 2`, rescaled to unit variance. Heavy tailed: it
    /// fails the exponential moment condition and exists for stress tests only.
    StudentTStress { df: f64 },
}

fn sqrt3() -> f64 {
    3f64.sqrt()
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::GaussianIid | NoiseSpec::Rademacher => Ok(()),
            NoiseSpec::UniformBounded { bound } => {
                if !(bound.is_finite() && bound > 0.0) {
                    Err(Error::config(format!("uniform bound must be positive, got {bound}")))
                } else if bound > sqrt3() + 1e-12 {
                    Err(Error::config(format!(
                        "uniform bound {bound} exceeds sqrt(3): variance would exceed one"
                    )))
                } else {
                    Ok(())
                }
            }
            NoiseSpec::StudentTStress { df } => {
                if df.is_finite() && df > 2.0 {
                    Ok(())
                } else {
                    Err(Error::config(format!("student-t df must exceed 2, got {df}")))
                }
            }
        }
    }

    /// Whether the family satisfies the exchangeable exponential moment condition.
    pub fn satisfies_moment_condition(&self) -> bool {
        !matches!(self, NoiseSpec::StudentTStress { .. })
    }

    /// Draws `n` standardized errors.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        let xi = match *self {
            NoiseSpec::GaussianIid => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            NoiseSpec::UniformBounded { bound } => {
                (0..n).map(|_| rng.random_range(-bound..=bound)).collect()
            }
            NoiseSpec::Rademacher => {
                (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
            }
            NoiseSpec::StudentTStress { df } => {
                let t = StudentT::new(df).map_err(|e| Error::config(e.to_string()))?;
                let scale = ((df - 2.0) / df).sqrt();
                (0..n).map(|_| scale * t.sample(rng)).collect()
            }
        };
        Ok(xi)
    }
}

/// `x_i = theta_i + sigma * xi_i` with `xi` drawn from the stream keyed by `seed`.
pub fn simulate(theta: &Signal, sigma: f64, noise: &NoiseSpec, seed: u64) -> Result<Observation> {
    simulate_with(theta, sigma, noise, &mut stream_rng(seed, &[]))
}

pub fn simulate_with(
    theta: &Signal,
    sigma: f64,
    noise: &NoiseSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Observation> {
    check_sigma(sigma)?;
    let xi = noise.draw(theta.n(), rng)?;
    let x = theta.theta().iter().zip(&xi).map(|(t, e)| t + sigma * e).collect();
    Observation::new(x, sigma)
}
