//! Monte Carlo harness: coverage/size of the thresholding ball on spike
//! designs, and empirical checks of posterior contraction, dimension control
//! and selector quality.
//!
//! Replication `r` draws from streams keyed by `(seed, …, r, purpose)`, runs
//! in parallel, and results are folded in index order, so output does not
//! depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{simulate_with, NoiseSpec};
use crate::numeric::complexity_unchecked;
use crate::oracle::{tau_oracle, tau_rate};
use crate::posterior;
use crate::rng::stream_rng;
use crate::selector::{restrict, select};
use crate::types::{check_positive, check_sigma, Observation, Signal};
use crate::uq::squared_distance;

const DATA_STREAM: u64 = 0;
const POSTERIOR_STREAM: u64 = 1;

/// One `(p, A)` design with its inflation factor `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignCell {
    pub p: usize,
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "M")]
    pub inflation: f64,
}

/// How the inflation factor `M` enters the ball radius.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusScale {
    /// `B(theta_check, sqrt(M) r_hat)`: squared radius `M r_hat^2`.
    #[default]
    SqrtM,
    /// `B(theta_check, M r_hat)`: squared radius `M^2 r_hat^2`.
    M,
}

impl RadiusScale {
    pub fn squared_factor(self, m: f64) -> f64 {
        match self {
            RadiusScale::SqrtM => m,
            RadiusScale::M => m * m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub sigma: f64,
    pub kappa: f64,
    pub replications: usize,
    pub grid: Vec<DesignCell>,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub radius_scale: RadiusScale,
    pub seed: u64,
}

impl ExperimentConfig {
    /// `n = 500`, `sigma = 1`, `kappa = 0.7`, 100 replications, Gaussian noise,
    /// `p in {25, 50, 100}`, `A in {3, 4, 5}` with the published inflation factors.
    pub fn published(seed: u64) -> Self {
        const CELLS: [(usize, f64, f64); 9] = [
            (25, 3.0, 2.2),
            (25, 4.0, 1.19),
            (25, 5.0, 1.0),
            (50, 3.0, 1.52),
            (50, 4.0, 1.1),
            (50, 5.0, 1.0),
            (100, 3.0, 1.23),
            (100, 4.0, 1.03),
            (100, 5.0, 1.0),
        ];
        Self {
            n: 500,
            sigma: 1.0,
            kappa: 0.7,
            replications: 100,
            grid: CELLS
                .iter()
                .map(|&(p, amplitude, inflation)| DesignCell { p, amplitude, inflation })
                .collect(),
            noise: NoiseSpec::GaussianIid,
            radius_scale: RadiusScale::SqrtM,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n must be at least 1"));
        }
        check_sigma(self.sigma)?;
        check_positive("kappa", self.kappa)?;
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        self.noise.validate()?;
        for cell in &self.grid {
            if cell.p > self.n {
                return Err(Error::config(format!("p={} exceeds n={}", cell.p, self.n)));
            }
            if !cell.amplitude.is_finite() {
                return Err(Error::config("amplitude must be finite"));
            }
            check_positive("M", cell.inflation)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub p: usize,
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "M")]
    pub inflation: f64,
    /// `M * mean(r_hat^2) / (p log(en/p))`.
    pub ratio: f64,
    pub coverage: f64,
    pub mean_k_hat: f64,
    pub se_coverage: f64,
    pub mean_radius_sq: f64,
    pub oracle_rate_sq: f64,
}

/// Per-replication outcome of the thresholding ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallReplicate {
    pub k_hat: usize,
    pub radius_sq: f64,
    /// `||theta_check - theta||^2`.
    pub distance_sq: f64,
}

fn cell_key(cell: &DesignCell) -> [u64; 2] {
    [cell.p as u64, cell.amplitude.to_bits()]
}

/// Runs every replication of one design cell. The data depend only on
/// `(seed, p, A, replication)`, not on `M` or on the cell's grid position.
pub fn cell_replicates(config: &ExperimentConfig, cell: &DesignCell) -> Result<Vec<BallReplicate>> {
    let theta = Signal::spikes(config.n, cell.p, cell.amplitude)?;
    let [p_key, a_key] = cell_key(cell);
    (0..config.replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(config.seed, &[p_key, a_key, r, DATA_STREAM]);
            let x = simulate_with(&theta, config.sigma, &config.noise, &mut rng)?;
            let sel = select(&x, config.kappa)?;
            let center = restrict(&x, &sel.selected);
            Ok(BallReplicate {
                k_hat: sel.cardinality,
                radius_sq: sel.radius_sq,
                distance_sq: squared_distance(center.theta(), theta.theta())?,
            })
        })
        .collect()
}

fn summarize(config: &ExperimentConfig, cell: &DesignCell, reps: &[BallReplicate]) -> ExperimentRow {
    let count = reps.len() as f64;
    let mean_radius_sq = reps.iter().map(|r| r.radius_sq).sum::<f64>() / count;
    let mean_k_hat = reps.iter().map(|r| r.k_hat as f64).sum::<f64>() / count;
    let covered = reps
        .iter()
        .filter(|r| r.distance_sq <= config.radius_scale.squared_factor(cell.inflation) * r.radius_sq)
        .count() as f64;
    let coverage = covered / count;
    let oracle_rate_sq = config.sigma * config.sigma * complexity_unchecked(cell.p, config.n);
    ExperimentRow {
        p: cell.p,
        amplitude: cell.amplitude,
        inflation: cell.inflation,
        ratio: cell.inflation * mean_radius_sq / oracle_rate_sq,
        coverage,
        mean_k_hat,
        se_coverage: (coverage * (1.0 - coverage) / count).sqrt(),
        mean_radius_sq,
        oracle_rate_sq,
    }
}

/// Coverage and relative size of `B(theta_check, sqrt(M) r_hat)` for every cell.
pub fn table1(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    config
        .grid
        .iter()
        .map(|cell| Ok(summarize(config, cell, &cell_replicates(config, cell)?)))
        .collect()
}

/// Like [`table1`], but each cell's `M` is replaced by the smallest multiple
/// of 0.01 whose empirical coverage reaches `target`.
pub fn table1_calibrated(config: &ExperimentConfig, target: f64) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::domain(format!("target coverage must lie in (0, 1], got {target}")));
    }
    config
        .grid
        .iter()
        .map(|cell| {
            let reps = cell_replicates(config, cell)?;
            let inflation = calibrate_inflation(&reps, target, config.radius_scale);
            let calibrated = DesignCell { inflation, ..*cell };
            Ok(summarize(config, &calibrated, &reps))
        })
        .collect()
}

/// Smallest `M = j / 100`, `j >= 1`, covering at least `ceil(target * reps)` replications.
pub fn calibrate_inflation(reps: &[BallReplicate], target: f64, scale: RadiusScale) -> f64 {
    let covered = |m: f64| {
        let f = scale.squared_factor(m);
        reps.iter().filter(|r| r.distance_sq <= f * r.radius_sq).count()
    };
    let needed = ((target * reps.len() as f64).ceil() as usize).clamp(1, reps.len());
    let mut ratios: Vec<f64> = reps.iter().map(|r| r.distance_sq / r.radius_sq).collect();
    ratios.sort_by(f64::total_cmp);
    let order_stat = match scale {
        RadiusScale::SqrtM => ratios[needed - 1],
        RadiusScale::M => ratios[needed - 1].sqrt(),
    };
    let mut j = ((order_stat * 100.0).ceil() as u64).max(1);
    // The estimate can land one step off through rounding in either direction.
    while j > 1 && covered((j - 1) as f64 / 100.0) >= needed {
        j -= 1;
    }
    while covered(j as f64 / 100.0) < needed {
        j += 1;
    }
    j as f64 / 100.0
}

/// Monte Carlo sizes for the posterior-based checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub replications: usize,
    /// Posterior draws per dataset (unused by the exact dimension check).
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "M")]
    pub m: f64,
    pub mass: f64,
}

fn check_grid(m_grid: &[f64]) -> Result<()> {
    if m_grid.is_empty() {
        return Err(Error::domain("M grid must not be empty"));
    }
    if m_grid.iter().any(|m| !m.is_finite()) {
        return Err(Error::domain("M grid values must be finite"));
    }
    Ok(())
}

fn check_mc(mc: &MonteCarlo, need_draws: bool) -> Result<()> {
    if mc.replications == 0 || (need_draws && mc.draws == 0) {
        return Err(Error::domain("replications and draws must be at least 1"));
    }
    Ok(())
}

fn observe(theta: &Signal, sigma: f64, noise: &NoiseSpec, seed: u64, r: u64) -> Result<Observation> {
    simulate_with(theta, sigma, noise, &mut stream_rng(seed, &[r, DATA_STREAM]))
}

fn average_curves(m_grid: &[f64], per_rep: Vec<Vec<f64>>) -> Vec<CurvePoint> {
    let reps = per_rep.len() as f64;
    m_grid
        .iter()
        .enumerate()
        .map(|(j, &m)| CurvePoint { m, mass: per_rep.iter().map(|c| c[j]).sum::<f64>() / reps })
        .collect()
}

/// Average posterior mass of `{||vartheta - theta||^2 >= m0 r^2(theta) + M sigma^2}`
/// for each `M` in `m_grid`, estimated from posterior draws.
#[allow(clippy::too_many_arguments)]
pub fn contraction_curve(
    theta: &Signal,
    sigma: f64,
    kappa: f64,
    noise: &NoiseSpec,
    seed: u64,
    m_grid: &[f64],
    m0: f64,
    mc: MonteCarlo,
) -> Result<Vec<CurvePoint>> {
    check_grid(m_grid)?;
    check_mc(&mc, true)?;
    if m0.is_nan() || m0 < 0.0 {
        return Err(Error::domain(format!("M0 must be nonnegative, got {m0}")));
    }
    let rate_sq = tau_oracle(theta, sigma, 1.0)?.rate_sq;
    let thresholds: Vec<f64> = m_grid.iter().map(|m| m0 * rate_sq + m * sigma * sigma).collect();
    let per_rep = (0..mc.replications as u64)
        .into_par_iter()
        .map(|r| {
            let x = observe(theta, sigma, noise, seed, r)?;
            let post = posterior::build(&x, kappa)?;
            let sampler = post.sampler(&x)?;
            let mut rng = stream_rng(seed, &[r, POSTERIOR_STREAM]);
            let mut hits = vec![0usize; thresholds.len()];
            for _ in 0..mc.draws {
                let draw = sampler.draw(&mut rng);
                let dist = squared_distance(&draw.value, theta.theta())?;
                for (h, t) in hits.iter_mut().zip(&thresholds) {
                    if dist >= *t {
                        *h += 1;
                    }
                }
            }
            Ok(hits.into_iter().map(|h| h as f64 / mc.draws as f64).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(average_curves(m_grid, per_rep))
}

/// Least-squares line through `(M, log mass)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogAffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `log mass` against `M` on the points with `mass >= min_mass`.
/// Needs at least three such points.
pub fn log_affine_fit(curve: &[CurvePoint], min_mass: f64) -> Option<LogAffineFit> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|c| c.mass >= min_mass && c.mass > 0.0)
        .map(|c| (c.m, c.mass.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LogAffineFit { slope, intercept: my - slope * mx, r_squared, points: pts.len() })
}

fn check_sparse(theta: &Signal) -> Result<usize> {
    match theta.sparsity() {
        0 => Err(Error::domain("dimension check needs s(theta) >= 1")),
        s => Ok(s),
    }
}

/// Average posterior mass of `{I : |I| > M s(theta)}`, computed exactly from
/// the cardinality posterior of each simulated dataset.
pub fn dimension_check(
    theta: &Signal,
    sigma: f64,
    kappa: f64,
    noise: &NoiseSpec,
    seed: u64,
    m_grid: &[f64],
    replications: usize,
) -> Result<Vec<CurvePoint>> {
    check_grid(m_grid)?;
    check_mc(&MonteCarlo { replications, draws: 0 }, false)?;
    let s = check_sparse(theta)? as f64;
    let per_rep = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let x = observe(theta, sigma, noise, seed, r)?;
            let post = posterior::build(&x, kappa)?;
            Ok(m_grid.iter().map(|m| post.mass_above(m * s)).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(average_curves(m_grid, per_rep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledMass {
    #[serde(rename = "M")]
    pub m: f64,
    pub mass: f64,
    /// Standard error across all draws pooled.
    pub se: f64,
}

/// Sampling estimate of the same oversized-subset mass, on the same datasets.
pub fn dimension_check_sampled(
    theta: &Signal,
    sigma: f64,
    kappa: f64,
    noise: &NoiseSpec,
    seed: u64,
    m_grid: &[f64],
    mc: MonteCarlo,
) -> Result<Vec<SampledMass>> {
    check_grid(m_grid)?;
    check_mc(&mc, true)?;
    let s = check_sparse(theta)? as f64;
    let per_rep = (0..mc.replications as u64)
        .into_par_iter()
        .map(|r| {
            let x = observe(theta, sigma, noise, seed, r)?;
            let post = posterior::build(&x, kappa)?;
            let sampler = post.sampler(&x)?;
            let mut rng = stream_rng(seed, &[r, POSTERIOR_STREAM]);
            let mut hits = vec![0usize; m_grid.len()];
            for _ in 0..mc.draws {
                let size = sampler.draw_subset(&mut rng).len() as f64;
                for (h, m) in hits.iter_mut().zip(m_grid) {
                    if size > m * s {
                        *h += 1;
                    }
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    let total = (mc.replications * mc.draws) as f64;
    Ok(m_grid
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let mass = per_rep.iter().map(|h| h[j]).sum::<usize>() as f64 / total;
            SampledMass { m, mass, se: (mass * (1.0 - mass) / total).sqrt() }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectorQuality {
    pub k_hat: usize,
    /// `r_tau^2(I_hat, theta)`.
    pub selected_rate_sq: f64,
    /// `r_tau^2(theta)`.
    pub oracle_rate_sq: f64,
    /// `selected_rate_sq / oracle_rate_sq`; absent when the oracle rate is 0.
    pub ratio: Option<f64>,
}

/// Per replication, the tau-rate of the selected set against the tau-oracle rate.
pub fn selector_quality(
    theta: &Signal,
    sigma: f64,
    kappa: f64,
    tau: f64,
    noise: &NoiseSpec,
    seed: u64,
    replications: usize,
) -> Result<Vec<SelectorQuality>> {
    check_mc(&MonteCarlo { replications, draws: 0 }, false)?;
    let oracle_rate_sq = tau_oracle(theta, sigma, tau)?.rate_sq;
    (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let x = observe(theta, sigma, noise, seed, r)?;
            let sel = select(&x, kappa)?;
            let selected_rate_sq = tau_rate(&sel.selected, theta, sigma, tau)?;
            Ok(SelectorQuality {
                k_hat: sel.cardinality,
                selected_rate_sq,
                oracle_rate_sq,
                ratio: (oracle_rate_sq > 0.0).then(|| selected_rate_sq / oracle_rate_sq),
            })
        })
        .collect()
}

/// Fraction of `values` strictly above each point of `grid`.
pub fn empirical_survival(values: &[f64], grid: &[f64]) -> Vec<f64> {
    let count = values.len().max(1) as f64;
    grid.iter()
        .map(|c| values.iter().filter(|v| **v > *c).count() as f64 / count)
        .collect()
}
