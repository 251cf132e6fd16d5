//! Gibbs sampler for `(x_{0:n}, θ_{1:N}, ζ_{2:N}, η_v, α) | y_{1:n}`.
//!
//! One sweep draws, in order: the latent path by forward filtering and
//! backward sampling, `θ`, `ζ` and `η_v` from their inverse-Gamma full
//! conditionals, and finally `α` by a random-walk Metropolis step on the
//! log scale.

mod alpha;
mod conditionals;
mod summary;
mod trace;

pub use alpha::{log_q_alpha, mh_step_alpha, AlphaMove, AlphaTarget};
pub use conditionals::{
    eta_v_conditional, sample_eta_v, sample_theta, sample_zeta, theta_conditionals, zeta_conditionals,
};
pub use summary::{summarize, PosteriorSummary, MIN_RETAINED};
pub use trace::Trace;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffbs::{backward_sample_into, forward_filter, state_noise_unchecked};
use crate::model::{bin_stats_unchecked, BinPartition, Observations};

/// Acceptance rate targeted by the burn-in adaptation of the `α` proposal.
pub const TARGET_ACCEPTANCE: f64 = 0.37;

const THETA_FLOOR: f64 = 1e-8;

/// Fixed hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    /// Shape of the `θ_1` prior; zero gives the vague limit.
    pub alpha1: f64,
    /// Scale of the `θ_1` prior; zero gives the vague limit.
    pub beta1: f64,
    /// `η_v ~ IG(alpha_v, beta_v)`.
    pub alpha_v: f64,
    pub beta_v: f64,
    /// Mean of `log α`.
    pub a: f64,
    /// Variance of `log α`.
    pub b: f64,
    /// `x_0 ~ N(mu0, c0)`.
    pub mu0: f64,
    pub c0: f64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            alpha1: 0.0,
            beta1: 0.0,
            alpha_v: 0.3,
            beta_v: 0.3,
            a: 1.0,
            b: 0.25,
            mu0: 0.0,
            c0: 25.0,
        }
    }
}

impl Hyper {
    /// Near-flat noise prior `IG(0.001, 0.001)`, for data with very small
    /// measurement noise.
    pub fn low_noise() -> Self {
        Hyper {
            alpha_v: 0.001,
            beta_v: 0.001,
            ..Hyper::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("alpha_v", self.alpha_v), ("beta_v", self.beta_v), ("b", self.b), ("c0", self.c0)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("alpha1", self.alpha1), ("beta1", self.beta1)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !self.a.is_finite() || !self.mu0.is_finite() {
            return Err(Error::Config("a and mu0 must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    iterations: usize,
    burnin_fraction: f64,
    proposal_step: f64,
    seed: u64,
    adapt: bool,
}

impl SamplerConfig {
    pub fn new(iterations: usize, burnin_fraction: f64, proposal_step: f64, seed: u64) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if !(burnin_fraction > 0.0 && burnin_fraction < 1.0) {
            return Err(Error::Config(format!(
                "burn-in fraction must lie in (0, 1), got {burnin_fraction}"
            )));
        }
        if !(proposal_step > 0.0 && proposal_step.is_finite()) {
            return Err(Error::Config(format!("proposal step must be positive, got {proposal_step}")));
        }
        Ok(SamplerConfig {
            iterations,
            burnin_fraction,
            proposal_step,
            seed,
            adapt: true,
        })
    }

    /// Turns the burn-in adaptation of the proposal step on or off.
    pub fn with_adaptation(mut self, adapt: bool) -> Self {
        self.adapt = adapt;
        self
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn burnin_fraction(&self) -> f64 {
        self.burnin_fraction
    }

    pub fn proposal_step(&self) -> f64 {
        self.proposal_step
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn adapt(&self) -> bool {
        self.adapt
    }

    pub fn burnin_iterations(&self) -> usize {
        burnin_count(self.iterations, self.burnin_fraction)
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig::new(30_000, 1.0 / 3.0, 0.4, 1).expect("valid defaults")
    }
}

/// `⌈fraction · total⌉`, tolerant of the rounding in `1.0 / 3.0`.
pub fn burnin_count(total: usize, fraction: f64) -> usize {
    ((fraction * total as f64) - 1e-9).ceil().max(0.0) as usize
}

/// One state of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    /// Latent path `x_0..x_n`.
    pub x: Vec<f64>,
    /// `θ_1..θ_N`.
    pub theta: Vec<f64>,
    /// `ζ_2..ζ_N`.
    pub zeta: Vec<f64>,
    pub eta_v: f64,
    pub alpha: f64,
}

impl ChainState {
    /// Data-driven starting point: `θ_k` from squared increments of the raw
    /// observations, `ζ_k = θ_{k−1}`, `α = e^a` and `η_v` at its prior mode.
    pub fn initial(obs: &Observations, partition: &BinPartition, hyper: &Hyper) -> Self {
        let y = obs.values();
        let mut pilot = Vec::with_capacity(y.len() + 1);
        pilot.push(y[0]);
        pilot.extend_from_slice(y);
        let stats = bin_stats_unchecked(&pilot, obs.times(), partition);
        let theta: Vec<f64> = stats
            .z
            .iter()
            .zip(&stats.counts)
            .map(|(z, &m)| (z / m as f64).max(THETA_FLOOR))
            .collect();
        let zeta = theta[..theta.len() - 1].to_vec();
        ChainState {
            x: pilot,
            theta,
            zeta,
            eta_v: hyper.beta_v / (hyper.alpha_v + 1.0),
            alpha: hyper.a.exp(),
        }
    }
}

/// A single chain, advanced one sweep at a time.
pub struct GibbsSampler<'a> {
    obs: &'a Observations,
    partition: BinPartition,
    hyper: Hyper,
    config: SamplerConfig,
    deltas: Vec<f64>,
    state: ChainState,
    rng: ChaCha8Rng,
    log_step: f64,
    iteration: usize,
}

impl<'a> GibbsSampler<'a> {
    pub fn new(obs: &'a Observations, partition: BinPartition, hyper: Hyper, config: SamplerConfig) -> Result<Self> {
        hyper.validate()?;
        partition.check_len(obs.len())?;
        if partition.num_bins() < 2 {
            return Err(Error::Unsupported("the chain prior needs at least 2 bins".into()));
        }
        let state = ChainState::initial(obs, &partition, &hyper);
        Ok(GibbsSampler {
            obs,
            partition,
            hyper,
            config,
            deltas: obs.deltas(),
            state,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            log_step: config.proposal_step.ln(),
            iteration: 0,
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    /// Current standard deviation of the `log α` proposal.
    pub fn proposal_step(&self) -> f64 {
        self.log_step.exp()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Runs one full sweep and reports whether the `α` proposal was accepted.
    pub fn sweep(&mut self) -> Result<bool> {
        let hyper = &self.hyper;
        let y = self.obs.values();

        let noise = state_noise_unchecked(&self.state.theta, &self.partition, &self.deltas);
        let filter = forward_filter(y, &noise, self.state.eta_v, hyper.mu0, hyper.c0)?;
        backward_sample_into(&filter.mu, &filter.c, &noise.w, &mut self.rng, &mut self.state.x);

        let stats = bin_stats_unchecked(&self.state.x, self.obs.times(), &self.partition);
        self.state.theta = sample_theta(&stats, &self.state.zeta, self.state.alpha, hyper, &mut self.rng)?;
        self.state.zeta = sample_zeta(&self.state.theta, self.state.alpha, &mut self.rng)?;
        self.state.eta_v = sample_eta_v(&self.state.x, y, hyper, &mut self.rng)?;

        let target = AlphaTarget::new(&self.state.theta, &self.state.zeta, hyper)?;
        let step = self.log_step.exp();
        let mv = mh_step_alpha(self.state.alpha, &target, step, &mut self.rng);
        self.state.alpha = mv.alpha;

        if self.config.adapt && self.iteration < self.config.burnin_iterations() {
            // Robbins-Monro on the log step size, frozen once burn-in ends.
            let gain = (self.iteration as f64 + 1.0).powf(-0.6);
            let hit = if mv.accepted { 1.0 } else { 0.0 };
            self.log_step += gain * (hit - TARGET_ACCEPTANCE);
        }
        self.iteration += 1;
        Ok(mv.accepted)
    }
}

/// Runs `config.iterations()` sweeps from [`ChainState::initial`] and
/// records every iteration, burn-in included.
pub fn run_sampler(obs: &Observations, partition: &BinPartition, hyper: &Hyper, config: &SamplerConfig) -> Result<Trace> {
    let mut sampler = GibbsSampler::new(obs, *partition, *hyper, *config)?;
    let edges = partition.edges(obs)?;
    let mut trace = Trace::with_capacity(edges, config.iterations(), config.burnin_iterations());
    for _ in 0..config.iterations() {
        let accepted = sampler.sweep()?;
        trace.push(sampler.state(), accepted);
    }
    trace.set_final_proposal_step(sampler.proposal_step());
    Ok(trace)
}

/// Runs independent chains on separate threads, chain `c` seeded with
/// `config.seed() + c`.
pub fn run_chains(
    obs: &Observations,
    partition: &BinPartition,
    hyper: &Hyper,
    config: &SamplerConfig,
    chains: usize,
) -> Result<Vec<Trace>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains as u64)
            .map(|c| {
                let cfg = SamplerConfig {
                    seed: config.seed.wrapping_add(c),
                    ..*config
                };
                scope.spawn(move || run_sampler(obs, partition, hyper, &cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler thread panicked"))
            .collect()
    })
}
