//! Several chains in parallel from different sampler seeds, with a crude
//! between/within variance ratio per bin as a convergence check.
//!
//! cargo run --release --example multi_chain -- [chains]

use microvol::simulate::{simulate_dataset, Model};
use microvol::{make_partition, run_chains, Hyper, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), microvol::Error> {
    let chains = std::env::args().nth(1).map_or(4, |s| s.parse().expect("chain count"));
    let data = simulate_dataset(Model::FanGijbels, 2000, 0.01, &mut ChaCha8Rng::seed_from_u64(5))?;
    let partition = make_partition(data.obs.len(), 20)?;
    let config = SamplerConfig::new(6000, 1.0 / 3.0, 0.4, 100)?;
    let traces = run_chains(&data.obs, &partition, &Hyper::default(), &config, chains)?;

    for (c, t) in traces.iter().enumerate() {
        println!("chain {}: acceptance {:.3}", c + 1, t.post_burnin_acceptance_rate().unwrap_or(f64::NAN));
    }
    // Potential scale reduction on xi_k = sqrt(theta_k).
    println!("bin  r_hat");
    for k in 1..=partition.num_bins() {
        let per_chain: Vec<Vec<f64>> = traces
            .iter()
            .map(|t| t.theta_series(k).skip(t.burnin()).map(f64::sqrt).collect())
            .collect();
        let len = per_chain[0].len() as f64;
        let means: Vec<f64> = per_chain.iter().map(|c| c.iter().sum::<f64>() / len).collect();
        let grand = means.iter().sum::<f64>() / means.len() as f64;
        let between = len * means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        let within = per_chain
            .iter()
            .zip(&means)
            .map(|(c, m)| c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (len - 1.0))
            .sum::<f64>()
            / means.len() as f64;
        let r_hat = (((len - 1.0) / len * within + between / len) / within).sqrt();
        println!("{k:>3}  {r_hat:.3}");
    }
    Ok(())
}
