//! Self-simulation check: constant unit volatility, zero drift, noise
//! variance 0.01, 4000 observations, 40 bins.
//!
//! cargo run --release --example recover_constant -- [data_seed] [sampler_seed]

use std::time::Instant;

use microvol::simulate::{simulate_dataset, Model};
use microvol::{make_partition, run_sampler, summarize, Hyper, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), microvol::Error> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer seed"));
    let data_seed = args.next().unwrap_or(1);
    let sampler_seed = args.next().unwrap_or(1);

    let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
    let data = simulate_dataset(Model::Constant(1.0), 4000, 0.01, &mut rng)?;
    let partition = make_partition(data.obs.len(), 40)?;
    let config = SamplerConfig::new(30_000, 1.0 / 3.0, 0.4, sampler_seed)?;

    let start = Instant::now();
    let trace = run_sampler(&data.obs, &partition, &Hyper::default(), &config)?;
    let elapsed = start.elapsed();
    let summary = summarize(&trace, 1.0 / 3.0, &partition.edges(&data.obs)?)?;

    let inside = summary.mean.iter().filter(|m| (0.8..=1.2).contains(*m)).count();
    let covered = summary.lower.iter().zip(&summary.upper).filter(|(l, u)| **l <= 1.0 && 1.0 <= **u).count();
    println!("bin  post_mean   q025     q975");
    for k in 0..summary.num_bins() {
        println!("{:>3}  {:.4}    {:.4}   {:.4}", k + 1, summary.mean[k], summary.lower[k], summary.upper[k]);
    }
    println!("posterior mean in [0.8, 1.2]: {inside}/{}", summary.num_bins());
    println!("band covers 1.0:              {covered}/{}", summary.num_bins());
    println!(
        "alpha acceptance after burn-in: {:.3} (step {:.3})",
        trace.post_burnin_acceptance_rate().unwrap_or(f64::NAN),
        trace.final_proposal_step().unwrap_or(f64::NAN)
    );
    let tail = &trace.eta_v()[trace.burnin()..];
    println!("posterior mean of eta_v: {:.5}", tail.iter().sum::<f64>() / tail.len() as f64);
    println!("elapsed: {:.1?}", elapsed);
    Ok(())
}
