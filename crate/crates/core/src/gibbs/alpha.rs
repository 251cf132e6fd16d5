//! Metropolis-within-Gibbs update of the chain-prior smoothing parameter `α`.
//!
//! The unnormalised full conditional is
//!
//! ```text
//! q(α) = π(α) (α^α / Γ(α))^{2(N−1)}
//!        · exp(−α Σ_{k=2}^N ζ_k⁻¹ (θ_{k−1}⁻¹ + θ_k⁻¹))
//!        · Π_{k=2}^N (θ_{k−1} θ_k ζ_k²)^{−α}
//! ```
//!
//! with `π` the lognormal density of `log α ~ N(a, b)`. Proposals are a
//! Gaussian random walk on `log α`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use super::Hyper;
use crate::error::{Error, Result};

/// The `α`-free part of `log q`, computed once per sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaTarget {
    pairs: usize,
    coupling: f64,
    mean_log: f64,
    var_log: f64,
}

impl AlphaTarget {
    pub fn new(theta: &[f64], zeta: &[f64], hyper: &Hyper) -> Result<Self> {
        if theta.len() < 2 || zeta.len() != theta.len() - 1 {
            return Err(Error::Shape(format!(
                "{} theta values need {} zeta values, got {}",
                theta.len(),
                theta.len().saturating_sub(1),
                zeta.len()
            )));
        }
        let coupling = theta
            .windows(2)
            .zip(zeta)
            .map(|(pair, &z)| (1.0 / pair[0] + 1.0 / pair[1]) / z + (pair[0] * pair[1] * z * z).ln())
            .sum();
        Ok(AlphaTarget {
            pairs: zeta.len(),
            coupling,
            mean_log: hyper.a,
            var_log: hyper.b,
        })
    }

    /// `log q(α)`.
    pub fn ln_q(&self, alpha: f64) -> f64 {
        let la = alpha.ln();
        let ln_prior = -la - 0.5 * (2.0 * PI * self.var_log).ln() - (la - self.mean_log).powi(2) / (2.0 * self.var_log);
        ln_prior + 2.0 * self.pairs as f64 * (alpha * la - ln_gamma(alpha)) - alpha * self.coupling
    }

    /// Log acceptance ratio for moving from `current` to `proposed` under a
    /// symmetric random walk on `log α`, including the log-Jacobian term.
    pub fn ln_accept_ratio(&self, current: f64, proposed: f64) -> f64 {
        self.ln_q(proposed) + proposed.ln() - self.ln_q(current) - current.ln()
    }
}

/// `log q(α)` for the given chain values.
pub fn log_q_alpha(alpha: f64, theta: &[f64], zeta: &[f64], hyper: &Hyper) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(AlphaTarget::new(theta, zeta, hyper)?.ln_q(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMove {
    pub alpha: f64,
    pub accepted: bool,
}

/// One random-walk Metropolis step on `log α` with standard deviation `step`.
///
/// Consumes one standard normal and one uniform.
pub fn mh_step_alpha<R: Rng + ?Sized>(alpha: f64, target: &AlphaTarget, step: f64, rng: &mut R) -> AlphaMove {
    let z: f64 = rng.sample(StandardNormal);
    let u: f64 = rng.gen();
    let proposed = if step == 0.0 { alpha } else { (alpha.ln() + step * z).exp() };
    let ratio = target.ln_accept_ratio(alpha, proposed);
    if u.ln() < ratio {
        AlphaMove {
            alpha: proposed,
            accepted: true,
        }
    } else {
        AlphaMove {
            alpha,
            accepted: false,
        }
    }
}
