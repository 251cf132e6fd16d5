//! Fan & Gijbels volatility with drift `−x`, noise variance 0.01, 4000
//! observations and 40 bins. Prints the posterior band next to the
//! bin-averaged true volatility.
//!
//! cargo run --release --example fan_gijbels -- [seed]

use microvol::simulate::{bin_average_sampled, simulate_dataset, Model};
use microvol::{make_partition, run_sampler, summarize, Hyper, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), microvol::Error> {
    let seed = std::env::args().nth(1).map_or(1, |s| s.parse().expect("integer seed"));
    let data = simulate_dataset(Model::FanGijbels, 4000, 0.01, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let partition = make_partition(data.obs.len(), 40)?;
    let config = SamplerConfig::new(30_000, 1.0 / 3.0, 0.4, seed)?;
    let trace = run_sampler(&data.obs, &partition, &Hyper::default(), &config)?;
    let edges = partition.edges(&data.obs)?;
    let summary = summarize(&trace, 1.0 / 3.0, &edges)?;
    let truth = bin_average_sampled(&data.fine_times, &data.fine_truth, &edges);

    println!("  t_lo    t_hi    truth   mean    q025    q975");
    let mut covered = 0;
    for k in 0..summary.num_bins() {
        let inside = summary.lower[k] <= truth[k] && truth[k] <= summary.upper[k];
        covered += inside as usize;
        println!(
            "{:.4}  {:.4}  {:.3}   {:.3}   {:.3}   {:.3} {}",
            edges[k],
            edges[k + 1],
            truth[k],
            summary.mean[k],
            summary.lower[k],
            summary.upper[k],
            if inside { "" } else { "*" }
        );
    }
    println!("band covers the truth in {covered}/{} bins", summary.num_bins());
    Ok(())
}
