//! One forward-filtering, backward-sampling pass on its own: fix the
//! volatility levels and the noise variance, then draw latent paths and
//! compare their average with the filtered means.
//!
//! cargo run --release --example ffbs_smoothing

use microvol::simulate::{simulate_dataset, Model};
use microvol::{backward_sample, forward_filter, make_partition, state_noise};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), microvol::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data = simulate_dataset(Model::Constant(1.0), 400, 0.01, &mut rng)?;
    let partition = make_partition(data.obs.len(), 4)?;
    let noise = state_noise(&[1.0; 4], &partition, &data.obs.deltas())?;
    let filter = forward_filter(data.obs.values(), &noise, 0.01, 0.0, 25.0)?;

    let draws = 2000;
    let mut mean = vec![0.0; data.obs.len() + 1];
    for _ in 0..draws {
        for (m, x) in mean.iter_mut().zip(backward_sample(&filter, &noise, &mut rng)?) {
            *m += x / draws as f64;
        }
    }
    println!("   t       y        latent   filtered smoothed");
    for i in (1..=data.obs.len()).step_by(40) {
        println!(
            "{:.4}  {:+.4}  {:+.4}  {:+.4}  {:+.4}",
            data.obs.times()[i],
            data.obs.values()[i - 1],
            data.latent[i],
            filter.mu[i],
            mean[i]
        );
    }
    let rmse = |est: &[f64]| {
        let sq: f64 = est.iter().zip(&data.latent[1..]).map(|(e, x)| (e - x).powi(2)).sum();
        (sq / est.len() as f64).sqrt()
    };
    println!(
        "rmse vs latent: raw {:.4}, filtered {:.4}, smoothed {:.4}",
        rmse(data.obs.values()),
        rmse(&filter.mu[1..]),
        rmse(&mean[1..])
    );
    Ok(())
}
