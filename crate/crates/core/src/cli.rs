//! Command-line workflows: `simulate`, `ingest`, `infer`, `summarize`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gibbs::{run_chains, summarize, Hyper, PosteriorSummary, SamplerConfig, Trace};
use crate::ingest::{parse_ticks, subsample_every, to_observations, TickFormat, TimeAnchor};
use crate::model::{make_partition, Observations};
use crate::simulate::{simulate_dataset, write_truth_csv, HestonParams, Model};

#[derive(Debug, Parser)]
#[command(name = "microvol", version, about = "Volatility learning from noisy high-frequency data")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate noisy observations of a diffusion on [0, 1].
    Simulate(SimulateArgs),
    /// Convert a tick CSV into an observations CSV.
    Ingest(IngestArgs),
    /// Run the Gibbs sampler and write trace and summary CSVs.
    Infer(InferArgs),
    /// Recompute a posterior summary from an existing trace.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    FanGijbels,
    Heston,
    Constant,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "fan-gijbels")]
    pub model: ModelChoice,
    #[arg(long, default_value_t = 4000)]
    pub n: usize,
    /// Measurement noise variance; defaults to 0.01 (1e-6 for heston).
    #[arg(long)]
    pub eta_v: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Optional `t,s_true` ground-truth CSV.
    #[arg(long)]
    pub out_truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep every k-th tick.
    #[arg(long, default_value_t = 10)]
    pub every: usize,
    #[arg(long, default_value_t = 1)]
    pub time_col: usize,
    #[arg(long, default_value_t = 2)]
    pub bid_col: usize,
    #[arg(long)]
    pub ask_col: Option<usize>,
    #[arg(long, default_value = "%Y%m%d %H:%M:%S%.f")]
    pub time_format: String,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Input has a header row.
    #[arg(long)]
    pub header: bool,
    /// Map midnight to 0 and the following midnight to 1.
    #[arg(long)]
    pub calendar_day: bool,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    /// Mean of log alpha.
    #[arg(long)]
    pub a: Option<f64>,
    /// Variance of log alpha.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub alpha_v: Option<f64>,
    #[arg(long)]
    pub beta_v: Option<f64>,
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Observations CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Summary CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Trace CSV; with several chains, one file per chain.
    #[arg(long)]
    pub out_trace: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    #[arg(long, default_value_t = 30_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub burnin_frac: f64,
    #[arg(long, default_value_t = 1)]
    pub sampler_seed: u64,
    #[arg(long, default_value_t = 0.4)]
    pub proposal_step: f64,
    /// Hyperparameter preset; heston switches the noise prior to IG(0.001, 0.001).
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Observations CSV the trace was produced from (for the bin edges).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, alias = "out-trace")]
    pub trace: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub burnin_frac: f64,
}

pub fn dispatch(config: &RunConfig) -> Result<()> {
    match &config.command {
        Command::Simulate(args) => simulate(args),
        Command::Ingest(args) => ingest(args),
        Command::Infer(args) => infer(args),
        Command::Summarize(args) => summarize_cmd(args),
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let (model, default_eta) = match args.model {
        ModelChoice::FanGijbels => (Model::FanGijbels, 0.01),
        ModelChoice::Heston => (Model::Heston(HestonParams::reference()), 1e-6),
        ModelChoice::Constant => (Model::Constant(1.0), 0.01),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let data = simulate_dataset(model, args.n, args.eta_v.unwrap_or(default_eta), &mut rng)?;
    data.obs.write_csv_file(&args.out)?;
    if let Some(path) = &args.out_truth {
        let file = create(path)?;
        write_truth_csv(data.obs.times(), &data.truth, std::io::BufWriter::new(file))?;
    }
    Ok(())
}

fn ingest(args: &IngestArgs) -> Result<()> {
    if !args.delimiter.is_ascii() {
        return Err(Error::Config("delimiter must be a single ASCII character".into()));
    }
    let format = TickFormat {
        delimiter: args.delimiter as u8,
        has_header: args.header,
        time_col: args.time_col,
        bid_col: args.bid_col,
        ask_col: args.ask_col,
        time_format: args.time_format.clone(),
    };
    let file = std::fs::File::open(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let series = parse_ticks(std::io::BufReader::new(file), &format)?;
    let thinned = subsample_every(&series, args.every)?;
    let anchor = if args.calendar_day {
        TimeAnchor::CalendarDay
    } else {
        TimeAnchor::FirstTick
    };
    to_observations(&thinned, anchor)?.write_csv_file(&args.out)
}

fn hyper_from(args: &InferArgs) -> Result<Hyper> {
    let base = match args.model {
        Some(ModelChoice::Heston) => Hyper::low_noise(),
        _ => Hyper::default(),
    };
    let h = &args.hyper;
    let hyper = Hyper {
        a: h.a.unwrap_or(base.a),
        b: h.b.unwrap_or(base.b),
        alpha_v: h.alpha_v.unwrap_or(base.alpha_v),
        beta_v: h.beta_v.unwrap_or(base.beta_v),
        mu0: h.mu0.unwrap_or(base.mu0),
        c0: h.c0.unwrap_or(base.c0),
        ..base
    };
    hyper.validate()?;
    Ok(hyper)
}

fn infer(args: &InferArgs) -> Result<()> {
    let config = SamplerConfig::new(args.iters, args.burnin_frac, args.proposal_step, args.sampler_seed)?;
    if args.chains == 0 {
        return Err(Error::Config("chains must be at least 1".into()));
    }
    let hyper = hyper_from(args)?;
    let obs = Observations::read_csv_file(&args.input)?;
    let partition = make_partition(obs.len(), args.bins)?;
    let traces = run_chains(&obs, &partition, &hyper, &config, args.chains)?;

    if let Some(path) = &args.out_trace {
        for (c, trace) in traces.iter().enumerate() {
            let path = if traces.len() == 1 {
                path.clone()
            } else {
                chain_path(path, c + 1)
            };
            trace.write_csv_file(path)?;
        }
    }
    for (c, trace) in traces.iter().enumerate() {
        let rate = trace.post_burnin_acceptance_rate().unwrap_or(f64::NAN);
        eprintln!("chain {}: alpha acceptance rate {rate:.4}", c + 1);
    }
    let edges = partition.edges(&obs)?;
    let summary = summarize_pooled(&traces, args.burnin_frac, &edges)?;
    summary.write_csv_file(&args.out)
}

/// Pools the post burn-in draws of all chains.
fn summarize_pooled(traces: &[Trace], burnin_frac: f64, edges: &[f64]) -> Result<PosteriorSummary> {
    if let [single] = traces {
        return summarize(single, burnin_frac, edges);
    }
    let mut rows = Vec::new();
    for trace in traces {
        let skip = crate::gibbs::burnin_count(trace.len(), burnin_frac);
        rows.extend((skip..trace.len()).map(|it| trace.theta(it).to_vec()));
    }
    summarize(&Trace::from_theta(rows)?, 0.0, edges)
}

fn chain_path(path: &Path, chain: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}.chain{chain}.{ext}"),
        None => format!("{stem}.chain{chain}"),
    };
    path.with_file_name(name)
}

fn summarize_cmd(args: &SummarizeArgs) -> Result<()> {
    let obs = Observations::read_csv_file(&args.input)?;
    let trace = Trace::read_csv_file(&args.trace)?;
    let partition = make_partition(obs.len(), trace.num_bins())?;
    if partition.num_bins() != trace.num_bins() {
        return Err(Error::Shape(format!(
            "trace has {} bins, which is not a partition of {} observations",
            trace.num_bins(),
            obs.len()
        )));
    }
    let summary = summarize(&trace, args.burnin_frac, &partition.edges(&obs)?)?;
    summary.write_csv_file(&args.out)
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| Error::io(path, e))
}
