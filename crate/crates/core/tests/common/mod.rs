//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Asymptotic 1% critical value of the one-sample Kolmogorov-Smirnov statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    (-(0.005f64).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// KS statistic of sorted samples against CDF values at those samples.
pub fn ks_statistic(cdf_at_sorted: &[f64]) -> f64 {
    assert!(cdf_at_sorted.iter().all(|f| f.is_finite()), "non-finite CDF value");
    let n = cdf_at_sorted.len() as f64;
    cdf_at_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let hi = (i as f64 + 1.0) / n - f;
            let lo = f - i as f64 / n;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Inverse-Gamma density `β^α/Γ(α) x^{−α−1} e^{−β/x}`, written out directly.
pub fn ig_pdf(shape: f64, scale: f64) -> impl Fn(f64) -> f64 {
    let log_norm = shape * scale.ln() - statrs::function::gamma::ln_gamma(shape);
    move |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (log_norm - (shape + 1.0) * x.ln() - scale / x).exp()
        }
    }
}

/// CDF of a density supported on `(0, ∞)` at each of the sorted points,
/// accumulated segment by segment.
pub fn cdf_by_quadrature(pdf: &dyn Fn(f64) -> f64, sorted: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(sorted.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &x in sorted {
        acc += integrate(pdf, prev, x, 1e-13);
        out.push(acc);
        prev = x;
    }
    out
}

/// KS statistic of samples against an inverse-Gamma law, CDF by quadrature.
pub fn ks_against_ig(mut samples: Vec<f64>, shape: f64, scale: f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let pdf = ig_pdf(shape, scale);
    ks_statistic(&cdf_by_quadrature(&pdf, &samples))
}

/// Quantile of a density on `(0, ∞)` by bisection on the quadrature CDF.
pub fn quantile_by_quadrature(pdf: &dyn Fn(f64) -> f64, p: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if integrate(pdf, 0.0, mid, 1e-13) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact smoothing law of `x_{0:n} | y_{1:n}` for the local-level model,
/// by joint-Gaussian conditioning on the full `(n+1)`-vector.
pub fn brute_force_smoother(y: &[f64], w: &[f64], eta_v: f64, mu0: f64, c0: f64) -> (DVector<f64>, DMatrix<f64>) {
    let n = y.len();
    // cumulative prior variance of x_i
    let mut cum = vec![c0; n + 1];
    for i in 1..=n {
        cum[i] = cum[i - 1] + w[i - 1];
    }
    let sxx = DMatrix::from_fn(n + 1, n + 1, |i, j| cum[i.min(j)]);
    let sxy = sxx.columns(1, n).into_owned();
    let mut syy = sxx.view((1, 1), (n, n)).into_owned();
    for i in 0..n {
        syy[(i, i)] += eta_v;
    }
    let resid = DVector::from_iterator(n, y.iter().map(|v| v - mu0));
    let chol = syy.cholesky().expect("observation covariance is positive definite");
    let mean = DVector::from_element(n + 1, mu0) + &sxy * chol.solve(&resid);
    let cov = &sxx - &sxy * chol.solve(&sxy.transpose());
    (mean, cov)
}

/// Checks empirical moments of the draws against an exact Gaussian law,
/// componentwise within `k` Monte-Carlo standard errors. Returns the worst
/// z-score seen.
pub fn gaussian_moment_zscore(draws: &[Vec<f64>], mean: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let d = mean.len();
    let s = draws.len() as f64;
    let mut emp_mean = vec![0.0; d];
    for x in draws {
        for i in 0..d {
            emp_mean[i] += x[i];
        }
    }
    emp_mean.iter_mut().for_each(|m| *m /= s);
    let mut emp_cov = DMatrix::<f64>::zeros(d, d);
    for x in draws {
        for i in 0..d {
            for j in 0..=i {
                emp_cov[(i, j)] += (x[i] - emp_mean[i]) * (x[j] - emp_mean[j]);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let se = (cov[(i, i)] / s).sqrt();
        worst = worst.max((emp_mean[i] - mean[i]).abs() / se);
        for j in 0..=i {
            let c = emp_cov[(i, j)] / (s - 1.0);
            let se = ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / (s - 1.0)).sqrt();
            worst = worst.max((c - cov[(i, j)]).abs() / se);
        }
    }
    worst
}

/// Draws a random local-level model with `n` observations and
/// heterogeneous state variances, runs FFBS `draws` times and returns the
/// worst moment z-score against the brute-force smoother.
pub fn ffbs_against_brute_force(seed: u64, n: usize, draws: usize) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.2) * rng.gen_range(0.1..4.0)).collect();
    let eta_v = rng.gen_range(0.01..1.0);
    let (mu0, c0) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.1..5.0));
    let noise = microvol::StateNoise { w };
    let filter = microvol::forward_filter(&y, &noise, eta_v, mu0, c0).unwrap();
    let samples: Vec<Vec<f64>> = (0..draws)
        .map(|_| microvol::backward_sample(&filter, &noise, &mut rng).unwrap())
        .collect();
    let (mean, cov) = brute_force_smoother(&y, &noise.w, eta_v, mu0, c0);
    gaussian_moment_zscore(&samples, &mean, &cov)
}

/// `q(α)` multiplied out factor by factor.
pub fn q_product(alpha: f64, theta: &[f64], zeta: &[f64], hyper: &microvol::Hyper) -> f64 {
    let (a, b) = (hyper.a, hyper.b);
    let prior = (-(alpha.ln() - a).powi(2) / (2.0 * b)).exp() / (alpha * (2.0 * std::f64::consts::PI * b).sqrt());
    let mut q = prior;
    for k in 1..theta.len() {
        let z = zeta[k - 1];
        // ζ_k | θ_{k-1} ~ IG(α, α/θ_{k-1}) and θ_k | ζ_k ~ IG(α, α/ζ_k)
        let s1 = alpha / theta[k - 1];
        q *= s1.powf(alpha) / statrs::function::gamma::gamma(alpha) * z.powf(-alpha - 1.0) * (-s1 / z).exp();
        let s2 = alpha / z;
        q *= s2.powf(alpha) / statrs::function::gamma::gamma(alpha) * theta[k].powf(-alpha - 1.0) * (-s2 / theta[k]).exp();
    }
    q
}

/// The α-free factors dropped from `q`.
pub fn dropped_factors(theta: &[f64], zeta: &[f64]) -> f64 {
    (1..theta.len()).map(|k| 1.0 / (zeta[k - 1] * theta[k])).product()
}
