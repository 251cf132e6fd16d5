use std::io::{Read, Write};
use std::path::Path;

use super::{burnin_count, Trace};
use crate::error::{Error, Result};
use crate::model::fmt_f64;

/// Minimum number of post burn-in iterations accepted by [`summarize`].
pub const MIN_RETAINED: usize = 100;

/// Per-bin posterior mean and central 95% interval of `ξ_k = √θ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub edges: Vec<f64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Drops the first `⌈burnin_fraction · M⌉` iterations and summarises `√θ_k`
/// per bin over the rest. `edges` are the bin edges `e_0..e_N`.
pub fn summarize(trace: &Trace, burnin_fraction: f64, edges: &[f64]) -> Result<PosteriorSummary> {
    if !(0.0..1.0).contains(&burnin_fraction) {
        return Err(Error::Config(format!(
            "burn-in fraction must lie in [0, 1), got {burnin_fraction}"
        )));
    }
    let bins = trace.num_bins();
    if edges.len() != bins + 1 {
        return Err(Error::Shape(format!("{bins} bins need {} edges, got {}", bins + 1, edges.len())));
    }
    let skip = burnin_count(trace.len(), burnin_fraction);
    let retained = trace.len() - skip;
    if retained < MIN_RETAINED {
        return Err(Error::InsufficientSamples {
            retained,
            required: MIN_RETAINED,
        });
    }
    let mut mean = Vec::with_capacity(bins);
    let mut lower = Vec::with_capacity(bins);
    let mut upper = Vec::with_capacity(bins);
    let mut xi = Vec::with_capacity(retained);
    for k in 0..bins {
        xi.clear();
        xi.extend(trace.theta_series(k).skip(skip).map(f64::sqrt));
        mean.push(xi.iter().sum::<f64>() / retained as f64);
        xi.sort_by(f64::total_cmp);
        lower.push(quantile_sorted(&xi, 0.025));
        upper.push(quantile_sorted(&xi, 0.975));
    }
    Ok(PosteriorSummary {
        edges: edges.to_vec(),
        mean,
        lower,
        upper,
    })
}

/// Linear interpolation between order statistics (`(S−1)p` convention).
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl PosteriorSummary {
    pub fn num_bins(&self) -> usize {
        self.mean.len()
    }

    /// Header `bin,t_lo,t_hi,post_mean,q025,q975`, bins numbered from 1.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["bin", "t_lo", "t_hi", "post_mean", "q025", "q975"])?;
        for k in 0..self.num_bins() {
            wtr.write_record([
                (k + 1).to_string(),
                fmt_f64(self.edges[k]),
                fmt_f64(self.edges[k + 1]),
                fmt_f64(self.mean[k]),
                fmt_f64(self.lower[k]),
                fmt_f64(self.upper[k]),
            ])?;
        }
        wtr.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if !headers.iter().eq(["bin", "t_lo", "t_hi", "post_mean", "q025", "q975"]) {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `bin,t_lo,t_hi,post_mean,q025,q975`".into(),
            });
        }
        let mut out = PosteriorSummary {
            edges: Vec::new(),
            mean: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
        };
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(row as u64 + 2, |p| p.line());
            let parse = |idx: usize| -> Result<f64> {
                record[idx].trim().parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad number `{}`: {e}", &record[idx]),
                })
            };
            if row == 0 {
                out.edges.push(parse(1)?);
            }
            out.edges.push(parse(2)?);
            out.mean.push(parse(3)?);
            out.lower.push(parse(4)?);
            out.upper.push(parse(5)?);
        }
        Ok(out)
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
