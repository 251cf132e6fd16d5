//! Tick ingestion: parse a quote file, keep every 10th tick, and map log bid
//! prices onto [0, 1]. Writes a synthetic day of quotes first so the example
//! is self-contained; pass a path to use your own file instead.
//!
//! cargo run --release --example ingest_ticks -- [ticks.csv [obs.csv]]

use std::io::BufReader;

use microvol::ingest::{parse_ticks, subsample_every, to_observations, TickFormat, TimeAnchor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic_ticks() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut out = String::new();
    let mut bid = 1.1185f64;
    let mut ms: u64 = 43;
    while ms < 86_400_000 {
        bid *= 1.0 + 2e-5 * rng.gen_range(-1.0..1.0);
        let (h, m, s, f) = (ms / 3_600_000, ms / 60_000 % 60, ms / 1000 % 60, ms % 1000);
        out.push_str(&format!("EUR/USD,20150302 {h:02}:{m:02}:{s:02}.{f:03},{bid:.5},{:.5}\n", bid + 6e-5));
        ms += rng.gen_range(100..3000);
    }
    out
}

fn main() -> Result<(), microvol::Error> {
    let format = TickFormat::default();
    let series = match std::env::args().nth(1) {
        Some(path) => {
            let file = std::fs::File::open(&path).map_err(|e| microvol::Error::io(&path, e))?;
            parse_ticks(BufReader::new(file), &format)?
        }
        None => parse_ticks(synthetic_ticks().as_bytes(), &format)?,
    };
    let thinned = subsample_every(&series, 10)?;
    let obs = to_observations(&thinned, TimeAnchor::FirstTick)?;
    println!("{} ticks, {} after thinning, {} observations", series.len(), thinned.len(), obs.len());
    println!("first {:?}, last {:?}", thinned.ticks()[0].time, thinned.ticks()[thinned.len() - 1].time);
    for i in [1, obs.len() / 2, obs.len()] {
        println!("t = {:.6}  log bid = {:.6}", obs.times()[i], obs.values()[i - 1]);
    }
    if let Some(out) = std::env::args().nth(2) {
        obs.write_csv_file(&out)?;
        println!("wrote {out}");
    }
    Ok(())
}
