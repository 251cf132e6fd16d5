//! Heston log-price with tiny measurement noise (variance 1e-6), 80 bins and
//! the near-flat noise prior. Compares the posterior mean with the realised
//! volatility averaged over each bin.
//!
//! cargo run --release --example heston -- [seed]

use microvol::simulate::{bin_average_sampled, simulate_dataset, HestonParams, Model};
use microvol::{make_partition, run_sampler, summarize, Hyper, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), microvol::Error> {
    let seed = std::env::args().nth(1).map_or(1, |s| s.parse().expect("integer seed"));
    let params = HestonParams::reference();
    let data = simulate_dataset(Model::Heston(params), 4000, 1e-6, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let partition = make_partition(data.obs.len(), 80)?;
    let config = SamplerConfig::new(30_000, 1.0 / 3.0, 0.4, seed)?;
    let trace = run_sampler(&data.obs, &partition, &Hyper::low_noise(), &config)?;
    let edges = partition.edges(&data.obs)?;
    let summary = summarize(&trace, 1.0 / 3.0, &edges)?;
    let truth = bin_average_sampled(&data.fine_times, &data.fine_truth, &edges);

    let mut rel: Vec<f64> = summary.mean.iter().zip(&truth).map(|(m, t)| (m - t).abs() / t).collect();
    for k in (0..summary.num_bins()).step_by(8) {
        println!("bin {:>2}: realised {:.4}  posterior {:.4} [{:.4}, {:.4}]", k + 1, truth[k], summary.mean[k], summary.lower[k], summary.upper[k]);
    }
    rel.sort_by(f64::total_cmp);
    println!("median relative error: {:.3}", rel[rel.len() / 2]);
    let tail = &trace.eta_v()[trace.burnin()..];
    println!("posterior mean of eta_v: {:.2e}", tail.iter().sum::<f64>() / tail.len() as f64);
    Ok(())
}
