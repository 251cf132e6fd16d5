//! Synthetic data: Euler scheme on a random fine grid, random observation
//! subsample, additive Gaussian measurement noise.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::model::Observations;

/// Scalar SDE `dX = b(t, X) dt + s(t, X) dW`, `X_0 = x0`.
pub struct SdeSpec<B, S> {
    pub drift: B,
    pub vol: S,
    pub x0: f64,
}

impl<B, S> SdeSpec<B, S>
where
    B: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> f64,
{
    pub fn new(drift: B, vol: S, x0: f64) -> Self {
        SdeSpec { drift, vol, x0 }
    }
}

/// Random fine grid on `[0, 1]` and the observation subsample drawn from it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPlan {
    /// `10n + 1` sorted times, first 0 and last 1.
    pub fine_times: Vec<f64>,
    /// `n` sorted indices into `fine_times`, never 0, always ending at the
    /// index of time 1.
    pub obs_indices: Vec<usize>,
}

impl GridPlan {
    /// `0` followed by the observation times.
    pub fn observation_times(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.obs_indices.iter().map(|&j| self.fine_times[j]))
            .collect()
    }
}

/// `10n − 1` uniform interior points plus `{0, 1}`, and a uniform subset of
/// `n` fine indices conditioned on containing the endpoint 1.
pub fn make_grid<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<GridPlan> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 observations, got {n}")));
    }
    let interior = 10 * n - 1;
    let fine_times = loop {
        let mut t: Vec<f64> = Vec::with_capacity(interior + 2);
        t.push(0.0);
        t.extend((0..interior).map(|_| rng.gen::<f64>()));
        t.push(1.0);
        t.sort_by(f64::total_cmp);
        if t.windows(2).all(|w| w[1] > w[0]) {
            break t;
        }
    };
    let last = fine_times.len() - 1;
    let mut obs_indices: Vec<usize> = index::sample(rng, last - 1, n - 1).into_iter().map(|j| j + 1).collect();
    obs_indices.sort_unstable();
    obs_indices.push(last);
    Ok(GridPlan {
        fine_times,
        obs_indices,
    })
}

/// Euler scheme `x_{j+1} = x_j + b(τ_j, x_j) δ_j + s(τ_j, x_j) √δ_j z_j`.
pub fn euler_path<B, S, R>(spec: &SdeSpec<B, S>, fine_times: &[f64], rng: &mut R) -> Vec<f64>
where
    B: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> f64,
    R: Rng + ?Sized,
{
    let mut path = Vec::with_capacity(fine_times.len());
    let mut x = spec.x0;
    path.push(x);
    for w in fine_times.windows(2) {
        let (tau, dt) = (w[0], w[1] - w[0]);
        let z: f64 = rng.sample(StandardNormal);
        x += (spec.drift)(tau, x) * dt + (spec.vol)(tau, x) * dt.sqrt() * z;
        path.push(x);
    }
    path
}

/// `s(t) = 3/2 + sin(2(4t − 2)) + 2 exp(−16 (4t − 2)²)`.
pub fn fan_gijbels(t: f64) -> f64 {
    let u = 4.0 * t - 2.0;
    1.5 + (2.0 * u).sin() + 2.0 * (-16.0 * u * u).exp()
}

/// Heston model for the price `S` with CIR variance `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonParams {
    pub mu: f64,
    pub kappa: f64,
    pub theta_lr: f64,
    pub sigma_cir: f64,
    pub rho: f64,
    pub z0: f64,
    pub s0: f64,
}

impl HestonParams {
    /// `μ = 0.05, κ = 7, θ = 0.04, σ = 0.6, ρ = −0.6`, started at the
    /// long-run variance with unit price.
    pub fn reference() -> Self {
        HestonParams {
            mu: 0.05,
            kappa: 7.0,
            theta_lr: 0.04,
            sigma_cir: 0.6,
            rho: -0.6,
            z0: 0.04,
            s0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.abs() <= 1.0) {
            return Err(Error::Domain(format!("correlation must lie in [-1, 1], got {}", self.rho)));
        }
        // zero vol-of-vol freezes the variance, which is a legitimate limit
        if !(self.sigma_cir >= 0.0) {
            return Err(Error::Domain(format!("sigma_cir must be nonnegative, got {}", self.sigma_cir)));
        }
        for (name, v) in [
            ("kappa", self.kappa),
            ("theta_lr", self.theta_lr),
            ("z0", self.z0),
            ("s0", self.s0),
        ] {
            if !(v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Log-price and variance paths on a fine grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HestonFine {
    pub log_price: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Joint Euler scheme for `(log S, Z)` with full truncation: `max(Z, 0)`
/// replaces `Z` inside every square root and in the drift terms. The price
/// is driven by `W`, the variance by `ρ W + √(1 − ρ²) W⊥`.
pub fn heston_euler<R: Rng + ?Sized>(params: &HestonParams, fine_times: &[f64], rng: &mut R) -> HestonFine {
    let n = fine_times.len();
    let mut log_price = Vec::with_capacity(n);
    let mut variance = Vec::with_capacity(n);
    let (mut x, mut z) = (params.s0.ln(), params.z0);
    log_price.push(x);
    variance.push(z);
    let rho_perp = (1.0 - params.rho * params.rho).sqrt();
    for w in fine_times.windows(2) {
        let dt = w[1] - w[0];
        let sq_dt = dt.sqrt();
        let dw: f64 = rng.sample(StandardNormal);
        let dperp: f64 = rng.sample(StandardNormal);
        let db = params.rho * dw + rho_perp * dperp;
        let zp = z.max(0.0);
        assert!(zp >= 0.0, "truncated variance must be nonnegative, got {zp}");
        let vol = zp.sqrt();
        x += (params.mu - 0.5 * zp) * dt + vol * sq_dt * dw;
        z += params.kappa * (params.theta_lr - zp) * dt + params.sigma_cir * vol * sq_dt * db;
        log_price.push(x);
        variance.push(z);
    }
    HestonFine { log_price, variance }
}

/// A simulated dataset together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    /// Noisy observations.
    pub obs: Observations,
    /// Latent process at `t_0..t_n`.
    pub latent: Vec<f64>,
    /// True volatility at `t_0..t_n`.
    pub truth: Vec<f64>,
    /// The fine simulation grid and the true volatility on it.
    pub fine_times: Vec<f64>,
    pub fine_truth: Vec<f64>,
}

/// Heston simulation at `n` observation times: noiseless log-price
/// observations and `√max(Z, 0)` at `t_0..t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HestonPath {
    pub obs: Observations,
    pub spot_vol: Vec<f64>,
    pub fine_times: Vec<f64>,
    pub fine_spot_vol: Vec<f64>,
}

pub fn simulate_heston<R: Rng + ?Sized>(params: &HestonParams, n: usize, rng: &mut R) -> Result<HestonPath> {
    params.validate()?;
    let grid = make_grid(n, rng)?;
    let fine = heston_euler(params, &grid.fine_times, rng);
    let fine_spot_vol: Vec<f64> = fine.variance.iter().map(|z| z.max(0.0).sqrt()).collect();
    let values = grid.obs_indices.iter().map(|&j| fine.log_price[j]).collect();
    let spot_vol = std::iter::once(fine_spot_vol[0])
        .chain(grid.obs_indices.iter().map(|&j| fine_spot_vol[j]))
        .collect();
    Ok(HestonPath {
        obs: Observations::new(grid.observation_times(), values)?,
        spot_vol,
        fine_times: grid.fine_times,
        fine_spot_vol,
    })
}

/// `y_i = x_{t_i} + v_i` with `v_i ~ N(0, η_v)` iid.
pub fn add_noise<R: Rng + ?Sized>(clean: &Observations, eta_v: f64, rng: &mut R) -> Result<Observations> {
    if !(eta_v >= 0.0 && eta_v.is_finite()) {
        return Err(Error::Domain(format!("noise variance must be nonnegative, got {eta_v}")));
    }
    let normal = Normal::new(0.0, eta_v.sqrt()).expect("finite nonnegative sd");
    let values = clean.values().iter().map(|x| x + normal.sample(rng)).collect();
    Observations::new(clean.times().to_vec(), values)
}

/// Data-generating models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Drift `b(x) = −x`, volatility [`fan_gijbels`], `x_0 = 0`.
    FanGijbels,
    /// Heston log-price.
    Heston(HestonParams),
    /// Zero drift, constant volatility, `x_0 = 0`.
    Constant(f64),
}

/// Simulates `n` noisy observations of the given model on `[0, 1]`.
pub fn simulate_dataset<R: Rng + ?Sized>(model: Model, n: usize, eta_v: f64, rng: &mut R) -> Result<SimulatedData> {
    let (clean, truth, fine_times, fine_truth) = match model {
        Model::Heston(params) => {
            let path = simulate_heston(&params, n, rng)?;
            (path.obs, path.spot_vol, path.fine_times, path.fine_spot_vol)
        }
        Model::FanGijbels => {
            let spec = SdeSpec::new(|_, x| -x, |t, _| fan_gijbels(t), 0.0);
            simulate_scalar(&spec, n, fan_gijbels, rng)?
        }
        Model::Constant(sigma) => {
            if !(sigma >= 0.0) {
                return Err(Error::Domain(format!("volatility must be nonnegative, got {sigma}")));
            }
            let spec = SdeSpec::new(|_, _| 0.0, move |_, _| sigma, 0.0);
            simulate_scalar(&spec, n, move |_| sigma, rng)?
        }
    };
    let mut latent = Vec::with_capacity(n + 1);
    latent.push(match model {
        Model::Heston(p) => p.s0.ln(),
        _ => 0.0,
    });
    latent.extend_from_slice(clean.values());
    let obs = add_noise(&clean, eta_v, rng)?;
    Ok(SimulatedData {
        obs,
        latent,
        truth,
        fine_times,
        fine_truth,
    })
}

type Simulated = (Observations, Vec<f64>, Vec<f64>, Vec<f64>);

fn simulate_scalar<B, S, F, R>(spec: &SdeSpec<B, S>, n: usize, truth: F, rng: &mut R) -> Result<Simulated>
where
    B: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> f64,
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    let grid = make_grid(n, rng)?;
    let path = euler_path(spec, &grid.fine_times, rng);
    let values = grid.obs_indices.iter().map(|&j| path[j]).collect();
    let times = grid.observation_times();
    let truth_obs = times.iter().map(|&t| truth(t)).collect();
    let fine_truth = grid.fine_times.iter().map(|&t| truth(t)).collect();
    Ok((Observations::new(times, values)?, truth_obs, grid.fine_times, fine_truth))
}

/// Time-weighted average of a sampled function over each bin
/// `[edges[k], edges[k+1]]`, using left-point values on the sampling grid.
pub fn bin_average_sampled(times: &[f64], values: &[f64], edges: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; edges.len() - 1];
    let mut widths = vec![0.0; edges.len() - 1];
    let mut k = 0;
    for (w, &v) in times.windows(2).zip(values) {
        let (lo, hi) = (w[0], w[1]);
        while k + 1 < sums.len() && lo >= edges[k + 1] {
            k += 1;
        }
        // split segments straddling a bin edge
        let mut start = lo;
        let mut kk = k;
        while kk + 1 < sums.len() && hi > edges[kk + 1] {
            let dt = edges[kk + 1] - start;
            sums[kk] += v * dt;
            widths[kk] += dt;
            start = edges[kk + 1];
            kk += 1;
        }
        sums[kk] += v * (hi - start);
        widths[kk] += hi - start;
    }
    sums.iter().zip(&widths).map(|(s, w)| s / w).collect()
}

/// Writes the ground-truth CSV `t,s_true`.
pub fn write_truth_csv<W: std::io::Write>(times: &[f64], truth: &[f64], writer: W) -> Result<()> {
    if times.len() != truth.len() {
        return Err(Error::Shape(format!("{} times for {} truth values", times.len(), truth.len())));
    }
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["t", "s_true"])?;
    for (t, s) in times.iter().zip(truth) {
        wtr.write_record([crate::model::fmt_f64(*t), crate::model::fmt_f64(*s)])?;
    }
    wtr.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Reads a `t,s_true` CSV.
pub fn read_truth_csv<R: std::io::Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_reader(reader);
    if !rdr.headers()?.iter().eq(["t", "s_true"]) {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `t,s_true`".into(),
        });
    }
    let (mut times, mut truth) = (Vec::new(), Vec::new());
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(row as u64 + 2, |p| p.line());
        let parse = |raw: &str| {
            raw.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("bad number `{raw}`: {e}"),
            })
        };
        times.push(parse(&record[0])?);
        truth.push(parse(&record[1])?);
    }
    Ok((times, truth))
}
