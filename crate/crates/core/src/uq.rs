//! Confidence balls and the theory-constant calculator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posterior;
use crate::selector;
use crate::types::{check_positive, Observation, Signal, NORMAL_KAPPA_BAR};

/// Which point estimate centers the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CenterMethod {
    /// `X` restricted to the selected set.
    #[default]
    Threshold,
    /// The posterior mean `(p_i X_i)`.
    Shrinkage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceBall {
    pub center: Signal,
    pub radius: f64,
    pub inflation_factor: f64,
    pub base_radius_sq: f64,
}

/// The ball `B(center, sqrt(M * r_hat^2))`.
pub fn confidence_ball(
    x: &Observation,
    kappa: f64,
    inflation: f64,
    center: CenterMethod,
) -> Result<ConfidenceBall> {
    check_positive("M", inflation)?;
    let sel = selector::select(x, kappa)?;
    let center = match center {
        CenterMethod::Threshold => selector::restrict(x, &sel.selected),
        CenterMethod::Shrinkage => {
            let post = posterior::build(x, kappa)?;
            posterior::shrinkage_mean(&post, x)?
        }
    };
    Ok(ConfidenceBall {
        center,
        radius: (inflation * sel.radius_sq).sqrt(),
        inflation_factor: inflation,
        base_radius_sq: sel.radius_sq,
    })
}

/// Closed Euclidean ball membership.
pub fn covers(ball: &ConfidenceBall, theta: &Signal) -> Result<bool> {
    Ok(squared_distance(ball.center.theta(), theta.theta())? <= ball.radius * ball.radius)
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum())
}

/// Squared radius of the ball with bias-dependent inflation,
/// `M2 (b_tau + tau) r_hat^2 + M sigma^2`. `M2` has no closed form and must be supplied.
pub fn inflated_radius_sq(m2: f64, ebr_ratio: f64, tau: f64, radius_sq: f64, m: f64, sigma: f64) -> f64 {
    m2 * (ebr_ratio + tau) * radius_sq + m * sigma * sigma
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalCaseConstants {
    pub h0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub kappa_bar_normal: f64,
    pub c1_exceeds_two: bool,
    pub kappa_exceeds_bar: bool,
}

/// Constants attached to the noise moment condition with parameters
/// `(beta, B)` and a prior weight `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryConstants {
    pub beta: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub kappa: f64,
    pub kappa_bar: f64,
    pub kappa_exceeds_bar: bool,
    pub normal_case: NormalCaseConstants,
}

impl TheoryConstants {
    /// `(6 (kappa beta + B)(1 + rho) + 3 beta) / (2 beta (1 - rho))` on `[0, 1)`.
    pub fn tau_bar(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let (beta, b, kappa) = (self.beta, self.b, self.kappa);
        Ok((6.0 * (kappa * beta + b) * (1.0 + rho) + 3.0 * beta) / (2.0 * beta * (1.0 - rho)))
    }

    /// Gaussian-noise version, `(4 kappa (1 + rho) + 2) / (1 - rho)`.
    pub fn normal_tau_bar(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok((4.0 * self.kappa * (1.0 + rho) + 2.0) / (1.0 - rho))
    }

    /// `alpha(tau, rho) = tau (1 - rho)/4 - kappa (1 + rho) - 1/2`.
    pub fn normal_alpha(&self, tau: f64, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(tau / 4.0 * (1.0 - rho) - self.kappa * (1.0 + rho) - 0.5)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::domain(format!("rho must lie in [0, 1), got {rho}")))
    }
}

pub fn normal_case(kappa: f64) -> NormalCaseConstants {
    let c1 = kappa - 0.5 * (2.0 * kappa + 1.0).ln() - kappa / (4.0 * kappa + 1.0);
    NormalCaseConstants {
        h0: 2.0 * kappa / (2.0 * kappa + 1.0),
        c1,
        c2: kappa / (4.0 * kappa + 1.0),
        c3: 4.0 * kappa + 1.0,
        kappa_bar_normal: NORMAL_KAPPA_BAR,
        c1_exceeds_two: c1 > 2.0,
        kappa_exceeds_bar: kappa > NORMAL_KAPPA_BAR,
    }
}

pub fn theory_constants(beta: f64, b: f64, kappa: f64) -> Result<TheoryConstants> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    check_positive("B", b)?;
    check_positive("kappa", kappa)?;
    let kappa_bar = (12.0 - beta + 4.0 * b) / (4.0 * beta);
    Ok(TheoryConstants {
        beta,
        b,
        kappa,
        kappa_bar,
        kappa_exceeds_bar: kappa > kappa_bar,
        normal_case: normal_case(kappa),
    })
}
