//! Inverse-Gamma full conditionals for `η_v`, `θ_{1:N}` and `ζ_{2:N}`.
//!
//! `zeta[j]` holds `ζ_{j+2}`, so `zeta.len() == theta.len() - 1`.

use rand::Rng;
use rand_distr::Distribution;

use super::Hyper;
use crate::dist::InverseGamma;
use crate::error::{Error, Result};
use crate::model::BinStats;

/// `η_v | x, y ~ IG(α_v + n/2, β_v + ½ Σ (y_i − x_i)²)`.
///
/// `x` is the latent path `x_0..x_n`, `y` the observations `y_1..y_n`.
pub fn eta_v_conditional(x: &[f64], y: &[f64], hyper: &Hyper) -> Result<InverseGamma> {
    if x.len() != y.len() + 1 {
        return Err(Error::Shape(format!(
            "latent path has {} entries for {} observations",
            x.len(),
            y.len()
        )));
    }
    let rss: f64 = x[1..].iter().zip(y).map(|(xi, yi)| (yi - xi) * (yi - xi)).sum();
    InverseGamma::new(hyper.alpha_v + y.len() as f64 / 2.0, hyper.beta_v + rss / 2.0)
}

pub fn sample_eta_v<R: Rng + ?Sized>(x: &[f64], y: &[f64], hyper: &Hyper, rng: &mut R) -> Result<f64> {
    Ok(eta_v_conditional(x, y, hyper)?.sample(rng))
}

/// Conditionally independent laws of `θ_1..θ_N` given `ζ`, `α` and the bin
/// statistics.
pub fn theta_conditionals(stats: &BinStats, zeta: &[f64], alpha: f64, hyper: &Hyper) -> Result<Vec<InverseGamma>> {
    let bins = stats.z.len();
    if bins < 2 {
        return Err(Error::Unsupported(format!("the chain prior needs at least 2 bins, got {bins}")));
    }
    if zeta.len() != bins - 1 || stats.counts.len() != bins {
        return Err(Error::Shape(format!(
            "{bins} bins need {} zeta values and {bins} counts, got {} and {}",
            bins - 1,
            zeta.len(),
            stats.counts.len()
        )));
    }
    (0..bins)
        .map(|k| {
            let half_m = stats.counts[k] as f64 / 2.0;
            let half_z = stats.z[k] / 2.0;
            let (shape, scale) = if k == 0 {
                (
                    hyper.alpha1 + alpha + half_m,
                    hyper.beta1 + alpha / zeta[0] + half_z,
                )
            } else if k == bins - 1 {
                (alpha + half_m, alpha / zeta[k - 1] + half_z)
            } else {
                (2.0 * alpha + half_m, alpha / zeta[k - 1] + alpha / zeta[k] + half_z)
            };
            InverseGamma::new(shape, scale)
        })
        .collect()
}

pub fn sample_theta<R: Rng + ?Sized>(
    stats: &BinStats,
    zeta: &[f64],
    alpha: f64,
    hyper: &Hyper,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(theta_conditionals(stats, zeta, alpha, hyper)?
        .iter()
        .map(|d| d.sample(rng))
        .collect())
}

/// `ζ_k | θ ~ IG(2α, α/θ_{k−1} + α/θ_k)` for `k = 2..N`.
pub fn zeta_conditionals(theta: &[f64], alpha: f64) -> Result<Vec<InverseGamma>> {
    if theta.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("theta must be positive".into()));
    }
    theta
        .windows(2)
        .map(|pair| InverseGamma::new(2.0 * alpha, alpha / pair[0] + alpha / pair[1]))
        .collect()
}

pub fn sample_zeta<R: Rng + ?Sized>(theta: &[f64], alpha: f64, rng: &mut R) -> Result<Vec<f64>> {
    Ok(zeta_conditionals(theta, alpha)?.iter().map(|d| d.sample(rng)).collect())
}
