//! Forward filtering, backward sampling for the local-level model
//!
//! ```text
//! x_i = x_{i-1} + u_i,   u_i ~ N(0, w_i)
//! y_i = x_i + v_i,       v_i ~ N(0, η_v)
//! ```
//!
//! with `x_0 ~ N(μ_0, C_0)`. Everything is scalar, so the recursions run in
//! plain variance form.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::BinPartition;

/// State-increment variances `w_1..w_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateNoise {
    pub w: Vec<f64>,
}

/// `w_i = θ_k Δ_i` where `k` is the bin of observation `i`.
pub fn state_noise(theta: &[f64], partition: &BinPartition, deltas: &[f64]) -> Result<StateNoise> {
    if theta.len() != partition.num_bins() {
        return Err(Error::Shape(format!(
            "{} theta values for {} bins",
            theta.len(),
            partition.num_bins()
        )));
    }
    partition.check_len(deltas.len())?;
    if theta.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("theta must be positive".into()));
    }
    if deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Domain("time increments must be positive".into()));
    }
    Ok(state_noise_unchecked(theta, partition, deltas))
}

pub(crate) fn state_noise_unchecked(theta: &[f64], partition: &BinPartition, deltas: &[f64]) -> StateNoise {
    let mut w = Vec::with_capacity(deltas.len());
    for (k, &th) in theta.iter().enumerate() {
        w.extend(partition.index_range(k + 1).map(|i| th * deltas[i - 1]));
    }
    StateNoise { w }
}

/// Output of the Kalman forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    /// Filtering means `μ_0..μ_n`.
    pub mu: Vec<f64>,
    /// Filtering variances `C_0..C_n`.
    pub c: Vec<f64>,
    /// Kalman gains `K_1..K_n`.
    pub gain: Vec<f64>,
    /// One-step prediction errors `e_1..e_n`.
    pub err: Vec<f64>,
}

/// Kalman forward pass.
///
/// `K_i = (C_{i-1} + w_i) / (C_{i-1} + w_i + η_v)`, `e_i = y_i − μ_{i-1}`,
/// `μ_i = μ_{i-1} + K_i e_i`, `C_i = K_i η_v`.
pub fn forward_filter(y: &[f64], noise: &StateNoise, eta_v: f64, mu0: f64, c0: f64) -> Result<FilterResult> {
    if !(eta_v > 0.0) {
        return Err(Error::Domain(format!("observation noise variance must be positive, got {eta_v}")));
    }
    if !(c0 >= 0.0) {
        return Err(Error::Domain(format!("prior variance must be nonnegative, got {c0}")));
    }
    if y.len() != noise.w.len() {
        return Err(Error::Shape(format!(
            "{} observations but {} state variances",
            y.len(),
            noise.w.len()
        )));
    }
    let n = y.len();
    let mut mu = Vec::with_capacity(n + 1);
    let mut c = Vec::with_capacity(n + 1);
    let mut gain = Vec::with_capacity(n);
    let mut err = Vec::with_capacity(n);
    mu.push(mu0);
    c.push(c0);
    let (mut m_prev, mut c_prev) = (mu0, c0);
    for (&yi, &wi) in y.iter().zip(&noise.w) {
        let r = c_prev + wi;
        let k = r / (r + eta_v);
        let e = yi - m_prev;
        m_prev += k * e;
        c_prev = k * eta_v;
        mu.push(m_prev);
        c.push(c_prev);
        gain.push(k);
        err.push(e);
    }
    Ok(FilterResult { mu, c, gain, err })
}

/// Draws one latent path `x̃_0..x̃_n` from the smoothing distribution.
///
/// `x̃_n ~ N(μ_n, C_n)`, then for `i = n-1, ..., 0`
/// `x̃_i ~ N(h_i, H_i)` with `h_i = μ_i + C_i/(C_i + w_{i+1}) (x̃_{i+1} − μ_i)`
/// and `H_i = C_i w_{i+1} / (C_i + w_{i+1})`. Exactly one standard normal is
/// consumed per state, in descending index order.
pub fn backward_sample<R: Rng + ?Sized>(filter: &FilterResult, noise: &StateNoise, rng: &mut R) -> Result<Vec<f64>> {
    let n = noise.w.len();
    if filter.mu.len() != n + 1 || filter.c.len() != n + 1 {
        return Err(Error::Shape(format!(
            "filter has {} states but noise implies {}",
            filter.mu.len(),
            n + 1
        )));
    }
    let mut x = vec![0.0; n + 1];
    backward_sample_into(&filter.mu, &filter.c, &noise.w, rng, &mut x);
    Ok(x)
}

pub(crate) fn backward_sample_into<R: Rng + ?Sized>(mu: &[f64], c: &[f64], w: &[f64], rng: &mut R, x: &mut [f64]) {
    let n = w.len();
    let z: f64 = rng.sample(StandardNormal);
    x[n] = mu[n] + c[n].sqrt() * z;
    for i in (0..n).rev() {
        let denom = c[i] + w[i];
        let (mean, var) = if denom > 0.0 {
            let ratio = c[i] / denom;
            (mu[i] + ratio * (x[i + 1] - mu[i]), ratio * w[i])
        } else {
            (mu[i], 0.0)
        };
        let z: f64 = rng.sample(StandardNormal);
        x[i] = mean + var.sqrt() * z;
    }
}
