//! Bayesian learning of a piecewise-constant volatility function from noisy
//! high-frequency observations of a diffusion.
//!
//! The latent path is drawn by forward filtering and backward sampling in a
//! Gaussian local-level model, the squared volatility levels carry an
//! inverse-Gamma Markov chain prior, and everything is tied together in a
//! Gibbs sampler with a Metropolis step for the prior's smoothing parameter.
//!
//! ```no_run
//! use microvol::{make_partition, run_sampler, summarize, Hyper, Observations, SamplerConfig};
//!
//! let obs = Observations::read_csv_file("obs.csv")?;
//! let partition = make_partition(obs.len(), 40)?;
//! let config = SamplerConfig::new(30_000, 1.0 / 3.0, 0.4, 1)?;
//! let trace = run_sampler(&obs, &partition, &Hyper::default(), &config)?;
//! let summary = summarize(&trace, 1.0 / 3.0, &partition.edges(&obs)?)?;
//! # Ok::<(), microvol::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dist;
pub mod error;
pub mod ffbs;
pub mod gibbs;
pub mod ingest;
pub mod model;
pub mod simulate;

pub use error::{Error, Result};
pub use ffbs::{backward_sample, forward_filter, state_noise, FilterResult, StateNoise};
pub use gibbs::{
    eta_v_conditional, log_q_alpha, mh_step_alpha, run_chains, run_sampler, sample_eta_v, sample_theta, sample_zeta,
    summarize, theta_conditionals, zeta_conditionals, AlphaTarget, ChainState, GibbsSampler, Hyper, PosteriorSummary,
    SamplerConfig, Trace,
};
pub use model::{bin_of, bin_stats, eval_step, make_partition, BinPartition, BinStats, Observations, StepVolatility};
