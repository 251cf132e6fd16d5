//! Observation model, bin partition of the time axis and the
//! piecewise-constant volatility representation.
//!
//! Observations are taken at `0 = t_0 < t_1 < ... < t_n = T`, with one noisy
//! value `y_i` per time `t_1..t_n`. The `n` observation indices are grouped
//! into `N` consecutive bins of `m` indices each, the last bin absorbing the
//! remainder `r` of `n = mN + r`.

use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use crate::error::{Error, Result};

/// Noisy observations of a scalar diffusion on an irregular time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Observations {
    /// `times` holds `t_0..t_n` (with `t_0 = 0`), `values` holds `y_1..y_n`.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidObservations(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if times.len() != values.len() + 1 {
            return Err(Error::InvalidObservations(format!(
                "{} times for {} values; expected one more time than values",
                times.len(),
                values.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidObservations(format!(
                "initial time must be 0, got {}",
                times[0]
            )));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidObservations(format!(
                "times not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidObservations(format!(
                "non-finite value at index {}",
                i + 1
            )));
        }
        Ok(Observations { times, values })
    }

    /// Number of observations `n`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `t_0..t_n`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `y_1..y_n`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Time increments `Δ_1..Δ_n`.
    pub fn deltas(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Writes the `t,y` CSV format. The first row carries `t_0` with an
    /// empty value field.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["t", "y"])?;
        wtr.write_record([fmt_f64(self.times[0]).as_str(), ""])?;
        for (t, y) in self.times[1..].iter().zip(&self.values) {
            wtr.write_record([fmt_f64(*t), fmt_f64(*y)])?;
        }
        wtr.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "y" {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `t,y`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(row as u64 + 2, |p| p.line());
            let field = |idx: usize| -> Result<f64> {
                let raw = record.get(idx).unwrap_or("");
                raw.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad number `{raw}`: {e}"),
                })
            };
            times.push(field(0)?);
            if row == 0 {
                if record.get(1).is_some_and(|s| !s.is_empty()) {
                    return Err(Error::Parse {
                        line,
                        message: "first row must carry t_0 with an empty y".into(),
                    });
                }
            } else {
                values.push(field(1)?);
            }
        }
        Observations::new(times, values)
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Grouping of the observation indices `1..=n` into `N` bins.
///
/// Bins `1..N-1` hold `m` indices each; bin `N` holds `m + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinPartition {
    n: usize,
    m: usize,
    bins: usize,
    remainder: usize,
}

/// Builds the partition for `n` observations and a requested bin count.
///
/// `m = ⌊n / target_bins⌋` and the bin count is recomputed as `⌊n / m⌋`, so
/// it equals `target_bins` whenever `target_bins` divides `n`.
pub fn make_partition(n: usize, target_bins: usize) -> Result<BinPartition> {
    if target_bins < 2 || target_bins >= n {
        return Err(Error::InvalidPartition(format!(
            "need 2 <= bins < n, got bins = {target_bins}, n = {n}"
        )));
    }
    let m = n / target_bins;
    let bins = n / m;
    Ok(BinPartition {
        n,
        m,
        bins,
        remainder: n - m * bins,
    })
}

impl BinPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Observations per regular bin.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of bins `N`.
    pub fn num_bins(&self) -> usize {
        self.bins
    }

    pub fn remainder(&self) -> usize {
        self.remainder
    }

    /// Observation count `m_k` of bin `k` (1-based).
    pub fn count(&self, k: usize) -> usize {
        if k == self.bins {
            self.m + self.remainder
        } else {
            self.m
        }
    }

    /// `m_1..m_N`.
    pub fn counts(&self) -> Vec<usize> {
        (1..=self.bins).map(|k| self.count(k)).collect()
    }

    /// Observation indices (1-based, inclusive) belonging to bin `k` (1-based).
    pub fn index_range(&self, k: usize) -> RangeInclusive<usize> {
        let lo = (k - 1) * self.m + 1;
        let hi = if k == self.bins { self.n } else { k * self.m };
        lo..=hi
    }

    /// Bin index `k` (1-based) of observation index `i` (1-based).
    pub fn bin_of(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            });
        }
        Ok(((i - 1) / self.m + 1).min(self.bins))
    }

    /// Bin edges `e_0..e_N` with `e_k = t_{mk}` for `k < N` and `e_N = T`.
    pub fn edges(&self, obs: &Observations) -> Result<Vec<f64>> {
        self.check_len(obs.len())?;
        let times = obs.times();
        let mut edges: Vec<f64> = (0..self.bins).map(|k| times[k * self.m]).collect();
        edges.push(obs.horizon());
        Ok(edges)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::Shape(format!(
                "partition built for n = {}, got {n} observations",
                self.n
            )));
        }
        Ok(())
    }
}

/// Free-function form of [`BinPartition::bin_of`].
pub fn bin_of(i: usize, partition: &BinPartition) -> Result<usize> {
    partition.bin_of(i)
}

/// Per-bin sums of squared, time-normalised latent increments.
#[derive(Debug, Clone, PartialEq)]
pub struct BinStats {
    /// `Z_1..Z_N`.
    pub z: Vec<f64>,
    /// `m_1..m_N`.
    pub counts: Vec<usize>,
}

/// `Z_k = Σ_{i in bin k} (x_i − x_{i−1})² / Δ_i`.
///
/// `x` holds the latent path `x_0..x_n` aligned with `obs.times()`.
pub fn bin_stats(x: &[f64], obs: &Observations, partition: &BinPartition) -> Result<BinStats> {
    partition.check_len(obs.len())?;
    if x.len() != obs.len() + 1 {
        return Err(Error::Shape(format!(
            "latent path has {} entries, expected {}",
            x.len(),
            obs.len() + 1
        )));
    }
    Ok(bin_stats_unchecked(x, obs.times(), partition))
}

pub(crate) fn bin_stats_unchecked(x: &[f64], times: &[f64], partition: &BinPartition) -> BinStats {
    let z = (1..=partition.num_bins())
        .map(|k| {
            partition
                .index_range(k)
                .map(|i| {
                    let dx = x[i] - x[i - 1];
                    dx * dx / (times[i] - times[i - 1])
                })
                .sum()
        })
        .collect();
    BinStats {
        z,
        counts: partition.counts(),
    }
}

/// A volatility function that is constant on every bin.
#[derive(Debug, Clone, PartialEq)]
pub struct StepVolatility {
    partition: BinPartition,
    edges: Vec<f64>,
    xi: Vec<f64>,
}

impl StepVolatility {
    pub fn new(partition: BinPartition, edges: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        let bins = partition.num_bins();
        if xi.len() != bins || edges.len() != bins + 1 {
            return Err(Error::Shape(format!(
                "{bins} bins need {bins} levels and {} edges, got {} and {}",
                bins + 1,
                xi.len(),
                edges.len()
            )));
        }
        if xi.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain("volatility levels must be positive and finite".into()));
        }
        Ok(StepVolatility {
            partition,
            edges,
            xi,
        })
    }

    /// Builds the step function from squared levels `θ_k`.
    pub fn from_theta(partition: BinPartition, edges: Vec<f64>, theta: &[f64]) -> Result<Self> {
        Self::new(partition, edges, theta.iter().map(|t| t.sqrt()).collect())
    }

    pub fn partition(&self) -> &BinPartition {
        &self.partition
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn theta(&self) -> Vec<f64> {
        self.xi.iter().map(|x| x * x).collect()
    }

    pub fn horizon(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    /// Bins are half-open `[e_{k-1}, e_k)` except the last, which is closed at `T`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let horizon = self.horizon();
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {horizon}]")));
        }
        let interior = &self.edges[1..self.edges.len() - 1];
        let k = interior.partition_point(|&e| e <= t);
        Ok(self.xi[k])
    }
}

/// Free-function form of [`StepVolatility::eval`].
pub fn eval_step(vol: &StepVolatility, t: f64) -> Result<f64> {
    vol.eval(t)
}
