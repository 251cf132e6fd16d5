//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the report is always
//! printed.

mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use microvol::simulate::{bin_average_sampled, simulate_dataset, HestonParams, Model, SimulatedData};
use microvol::{
    bin_stats, eta_v_conditional, log_q_alpha, make_partition, mh_step_alpha, run_sampler, sample_eta_v, sample_theta,
    sample_zeta, summarize, theta_conditionals, zeta_conditionals, AlphaTarget, Hyper, Observations, PosteriorSummary,
    SamplerConfig, Trace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N_OBS: usize = 4000;
const ITERS: usize = 30_000;
const BURNIN: f64 = 1.0 / 3.0;
const SEEDS: [u64; 3] = [1, 2, 3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, outcome: &Outcome) {
    let verdict = if outcome.pass { "PASS" } else { "FAIL" };
    println!("criterion {id} ({name}): {verdict} -- {}", outcome.detail);
}

// 1 ------------------------------------------------------------------------

fn ffbs_oracle() -> Outcome {
    let start = Instant::now();
    let worst = (0..20).map(|m| ffbs_against_brute_force(100 + m, 10, 50_000)).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    Outcome {
        pass: worst < 4.0 && elapsed < Duration::from_secs(60),
        detail: format!("worst |z| {worst:.2} (< 4) over 20 models, {:.1} s (< 60 s)", elapsed.as_secs_f64()),
    }
}

// 2 ------------------------------------------------------------------------

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn conjugacy() -> Outcome {
    const DRAWS: usize = 10_000;
    let crit = ks_critical_1pct(DRAWS);
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let hyper = Hyper::default();

    let n = 12;
    let mut times = vec![0.0];
    for _ in 0..n {
        let last = *times.last().unwrap();
        times.push(last + rng.gen_range(0.01..0.1));
    }
    let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let obs = Observations::new(times.clone(), y.clone()).unwrap();
    let partition = make_partition(n, 4).unwrap();
    let stats = bin_stats(&x, &obs, &partition).unwrap();
    let z: Vec<f64> = (0..4)
        .map(|k| (3 * k + 1..=3 * k + 3).map(|i| (x[i] - x[i - 1]).powi(2) / (times[i] - times[i - 1])).sum())
        .collect();
    let zeta = [0.8, 1.7, 0.4];
    let alpha = 2.3;

    let mut symbolic = true;
    let mut ks = Vec::new();

    let rss: f64 = (0..n).map(|i| (y[i] - x[i + 1]).powi(2)).sum();
    let (shape, scale) = (hyper.alpha_v + n as f64 / 2.0, hyper.beta_v + rss / 2.0);
    let law = eta_v_conditional(&x, &y, &hyper).unwrap();
    symbolic &= close(law.shape(), shape) && close(law.scale(), scale);
    let draws = (0..DRAWS).map(|_| sample_eta_v(&x, &y, &hyper, &mut rng).unwrap()).collect();
    ks.push(("eta_v", ks_against_ig(draws, shape, scale)));

    let theta_params = [
        (alpha + 1.5, alpha / zeta[0] + z[0] / 2.0),
        (2.0 * alpha + 1.5, alpha / zeta[0] + alpha / zeta[1] + z[1] / 2.0),
        (alpha + 1.5, alpha / zeta[2] + z[3] / 2.0),
    ];
    let laws = theta_conditionals(&stats, &zeta, alpha, &hyper).unwrap();
    for (law, (shape, scale)) in [&laws[0], &laws[1], &laws[3]].into_iter().zip(theta_params) {
        symbolic &= close(law.shape(), shape) && close(law.scale(), scale);
    }
    let mut theta_draws = (0..4).map(|_| Vec::with_capacity(DRAWS)).collect::<Vec<_>>();
    for _ in 0..DRAWS {
        for (k, t) in sample_theta(&stats, &zeta, alpha, &hyper, &mut rng).unwrap().into_iter().enumerate() {
            theta_draws[k].push(t);
        }
    }
    for (label, k, (shape, scale)) in [("theta first", 0, theta_params[0]), ("theta interior", 1, theta_params[1]), ("theta last", 3, theta_params[2])] {
        ks.push((label, ks_against_ig(std::mem::take(&mut theta_draws[k]), shape, scale)));
    }

    let theta = [0.5, 2.0, 1.1];
    let (shape, scale) = (2.0 * alpha, alpha / 0.5 + alpha / 2.0);
    let law = zeta_conditionals(&theta, alpha).unwrap()[0];
    symbolic &= close(law.shape(), shape) && close(law.scale(), scale);
    let draws = (0..DRAWS).map(|_| sample_zeta(&theta, alpha, &mut rng).unwrap()[0]).collect();
    ks.push(("zeta", ks_against_ig(draws, shape, scale)));

    let worst = ks.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let listing: Vec<String> = ks.iter().map(|(l, d)| format!("{l} {d:.4}")).collect();
    Outcome {
        pass: symbolic && worst < crit,
        detail: format!(
            "parameters {}; KS {} (critical {crit:.4})",
            if symbolic { "match" } else { "MISMATCH" },
            listing.join(", ")
        ),
    }
}

// 3 ------------------------------------------------------------------------

fn alpha_step() -> Outcome {
    let hyper = Hyper::default();
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..200 {
        let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(0.2..3.0)).collect();
        let zeta: Vec<f64> = (0..2).map(|_| rng.gen_range(0.2..3.0)).collect();
        let alpha = rng.gen_range(0.05..30.0);
        let direct = q_product(alpha, &theta, &zeta, &hyper) / dropped_factors(&theta, &zeta);
        let ours = log_q_alpha(alpha, &theta, &zeta, &hyper).unwrap().exp();
        worst_rel = worst_rel.max((ours - direct).abs() / direct);
    }

    let (theta, zeta) = ([0.7, 1.4, 0.9], [1.1, 0.8]);
    let target = AlphaTarget::new(&theta, &zeta, &hyper).unwrap();
    // The product form overflows past log α ≈ 4.9; the mass there is negligible.
    let (lo, hi, cells) = (-5.0f64, 4.5f64, 200_000);
    let h = (hi - lo) / cells as f64;
    let mut cdf = vec![0.0; cells + 1];
    let dens = |u: f64| u.exp() * q_product(u.exp(), &theta, &zeta, &hyper);
    for i in 1..=cells {
        let u = lo + i as f64 * h;
        cdf[i] = cdf[i - 1] + 0.5 * h * (dens(u) + dens(u - h));
    }
    let total = cdf[cells];
    assert!(total.is_finite() && total > 0.0, "quadrature normaliser {total}");
    let mut alpha = 1.0;
    for _ in 0..1000 {
        alpha = mh_step_alpha(alpha, &target, 1.0, &mut rng).alpha;
    }
    let (keep, thin) = (100_000, 20);
    let mut kept = Vec::with_capacity(keep);
    while kept.len() < keep {
        for _ in 0..thin {
            alpha = mh_step_alpha(alpha, &target, 1.0, &mut rng).alpha;
        }
        kept.push(alpha);
    }
    kept.sort_by(f64::total_cmp);
    let f: Vec<f64> = kept
        .iter()
        .map(|&a| {
            let u = ((a.ln() - lo) / h).clamp(0.0, cells as f64 - 1e-9);
            let i = u as usize;
            (cdf[i] + (u - i as f64) * (cdf[i + 1] - cdf[i])) / total
        })
        .collect();
    let d = ks_statistic(&f);
    let crit = ks_critical_1pct(keep);
    Outcome {
        pass: worst_rel < 1e-10 && d < crit,
        detail: format!(
            "q(alpha) worst relative error {worst_rel:.1e} (< 1e-10); MH KS {d:.4} (critical {crit:.4}, 1e5 iterates thinned by {thin})"
        ),
    }
}

// 4-8 ----------------------------------------------------------------------

struct Run {
    data: SimulatedData,
    edges: Vec<f64>,
    summary: PosteriorSummary,
    acceptance: f64,
    elapsed: Duration,
}

fn full_run(model: Model, eta_v: f64, bins: usize, hyper: Hyper, seed: u64) -> Run {
    let data = simulate_dataset(model, N_OBS, eta_v, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    let partition = make_partition(N_OBS, bins).unwrap();
    let config = SamplerConfig::new(ITERS, BURNIN, 0.4, seed).unwrap();
    let start = Instant::now();
    let trace = run_sampler(&data.obs, &partition, &hyper, &config).unwrap();
    let edges = partition.edges(&data.obs).unwrap();
    let summary = summarize(&trace, BURNIN, &edges).unwrap();
    let elapsed = start.elapsed();
    Run {
        acceptance: trace.post_burnin_acceptance_rate().unwrap(),
        data,
        edges,
        summary,
        elapsed,
    }
}

fn constant_recovery(runs: &[Run]) -> Outcome {
    let (mut in_range, mut covered, mut total) = (0, 0, 0);
    let mut per_seed = Vec::new();
    for run in runs {
        let s = &run.summary;
        let r = s.mean.iter().filter(|&&m| (0.8..=1.2).contains(&m)).count();
        let c = (0..s.num_bins()).filter(|&k| s.lower[k] <= 1.0 && 1.0 <= s.upper[k]).count();
        per_seed.push(format!("{r}/{c}"));
        in_range += r;
        covered += c;
        total += s.num_bins();
    }
    let (fr, fc) = (in_range as f64 / total as f64, covered as f64 / total as f64);
    Outcome {
        pass: fr >= 0.9 && fc >= 0.9,
        detail: format!(
            "mean in [0.8, 1.2] for {:.1}% of bins, band covers 1.0 for {:.1}% (both need >= 90%; per seed mean/band {})",
            100.0 * fr,
            100.0 * fc,
            per_seed.join(", ")
        ),
    }
}

fn bin_truth(run: &Run) -> Vec<f64> {
    bin_average_sampled(&run.data.fine_times, &run.data.fine_truth, &run.edges)
}

fn fan_gijbels_coverage(runs: &[Run]) -> Outcome {
    let (mut covered, mut total) = (0, 0);
    let mut per_seed = Vec::new();
    for run in runs {
        let truth = bin_truth(run);
        let s = &run.summary;
        let c = (0..s.num_bins()).filter(|&k| s.lower[k] <= truth[k] && truth[k] <= s.upper[k]).count();
        per_seed.push(format!("{c}/{}", s.num_bins()));
        covered += c;
        total += s.num_bins();
    }
    let frac = covered as f64 / total as f64;
    Outcome {
        pass: frac >= 0.75,
        detail: format!("band covers bin-averaged s in {:.1}% of bins (>= 75%; per seed {})", 100.0 * frac, per_seed.join(", ")),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn heston_tracking(runs: &[Run]) -> Outcome {
    let medians: Vec<f64> = runs
        .iter()
        .map(|run| {
            let truth = bin_truth(run);
            median(run.summary.mean.iter().zip(&truth).map(|(m, t)| (m - t).abs() / t).collect())
        })
        .collect();
    let worst = medians.iter().copied().fold(0.0, f64::max);
    let listing: Vec<String> = medians.iter().map(|m| format!("{m:.3}")).collect();
    Outcome {
        pass: worst < 0.25,
        detail: format!("median relative error per seed {} (< 0.25)", listing.join(", ")),
    }
}

fn mh_tuning(groups: &[(&str, &[Run])]) -> Outcome {
    let mut pass = true;
    let mut listing = Vec::new();
    for (label, runs) in groups {
        let rates: Vec<String> = runs
            .iter()
            .map(|r| {
                pass &= (0.30..=0.50).contains(&r.acceptance);
                format!("{:.3}", r.acceptance)
            })
            .collect();
        listing.push(format!("{label} {}", rates.join("/")));
    }
    Outcome {
        pass,
        detail: format!("post burn-in acceptance in [0.30, 0.50]: {}", listing.join("; ")),
    }
}

fn runtime(runs: &[&Run]) -> Outcome {
    let worst = runs.iter().map(|r| r.elapsed).max().unwrap();
    let secs = worst.as_secs_f64();
    Outcome {
        pass: secs < 11.0 * 60.0,
        detail: format!(
            "slowest n = 4000, M = 30000 run {secs:.1} s (limit 660 s; target 120 s {})",
            if secs < 120.0 { "met" } else { "missed" }
        ),
    }
}

// 9 ------------------------------------------------------------------------

fn microvol(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_microvol"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn end_to_end(dir: &Path) -> Option<(Vec<u8>, Vec<u8>)> {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let ok = microvol(&["simulate", "--model", "fan-gijbels", "--n", "4000", "--seed", "9", "--out", &p("obs.csv")])
        && microvol(&[
            "infer", "--input", &p("obs.csv"), "--out", &p("summary.csv"), "--out-trace", &p("trace.csv"),
            "--sampler-seed", "9",
        ]);
    if !ok {
        return None;
    }
    Some((std::fs::read(dir.join("trace.csv")).ok()?, std::fs::read(dir.join("summary.csv")).ok()?))
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    match (end_to_end(a.path()), end_to_end(b.path())) {
        (Some(x), Some(y)) => {
            // The stored files must also parse back.
            let parsed = Trace::read_csv_file(a.path().join("trace.csv")).is_ok()
                && PosteriorSummary::read_csv_file(a.path().join("summary.csv")).is_ok();
            Outcome {
                pass: x == y && parsed,
                detail: format!(
                    "trace identical: {}, summary identical: {} ({} + {} bytes)",
                    x.0 == y.0,
                    x.1 == y.1,
                    x.0.len(),
                    x.1.len()
                ),
            }
        }
        _ => Outcome {
            pass: false,
            detail: "end-to-end CLI run failed".into(),
        },
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let mut record = |id: usize, name: &str, outcome: Outcome| {
        report(id, name, &outcome);
        all &= outcome.pass;
    };

    record(1, "FFBS oracle equivalence", ffbs_oracle());
    record(2, "conjugacy suite", conjugacy());
    record(3, "alpha step", alpha_step());

    let constant: Vec<Run> = SEEDS.iter().map(|&s| full_run(Model::Constant(1.0), 0.01, 40, Hyper::default(), s)).collect();
    let fan: Vec<Run> = SEEDS.iter().map(|&s| full_run(Model::FanGijbels, 0.01, 40, Hyper::default(), s)).collect();
    let heston: Vec<Run> = SEEDS
        .iter()
        .map(|&s| full_run(Model::Heston(HestonParams::reference()), 1e-6, 80, Hyper::low_noise(), s))
        .collect();

    record(4, "constant-volatility recovery", constant_recovery(&constant));
    record(5, "Fan & Gijbels coverage", fan_gijbels_coverage(&fan));
    record(6, "Heston tracking", heston_tracking(&heston));
    record(7, "MH tuning", mh_tuning(&[("constant", &constant), ("fan-gijbels", &fan), ("heston", &heston)]));
    let timed: Vec<&Run> = constant.iter().chain(&fan).collect();
    record(8, "runtime", runtime(&timed));
    record(9, "determinism", determinism());

    if all {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: at least one criterion failed");
        ExitCode::FAILURE
    }
}
