use std::io::{Read, Write};
use std::path::Path;

use super::ChainState;
use crate::error::{Error, Result};
use crate::model::fmt_f64;

/// Every iteration of a chain, burn-in included.
///
/// A trace read back from CSV carries only `α`, `η_v` and `θ`; the `ζ`
/// draws and acceptance flags are not part of the file format.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    bins: usize,
    edges: Vec<f64>,
    theta: Vec<f64>,
    zeta: Vec<f64>,
    eta_v: Vec<f64>,
    alpha: Vec<f64>,
    accepted: Vec<bool>,
    burnin: usize,
    final_step: Option<f64>,
}

impl Trace {
    pub(crate) fn with_capacity(edges: Vec<f64>, iterations: usize, burnin: usize) -> Self {
        let bins = edges.len() - 1;
        Trace {
            bins,
            edges,
            theta: Vec::with_capacity(iterations * bins),
            zeta: Vec::with_capacity(iterations * (bins - 1)),
            eta_v: Vec::with_capacity(iterations),
            alpha: Vec::with_capacity(iterations),
            accepted: Vec::with_capacity(iterations),
            burnin,
            final_step: None,
        }
    }

    pub(crate) fn push(&mut self, state: &ChainState, accepted: bool) {
        self.theta.extend_from_slice(&state.theta);
        self.zeta.extend_from_slice(&state.zeta);
        self.eta_v.push(state.eta_v);
        self.alpha.push(state.alpha);
        self.accepted.push(accepted);
    }

    pub(crate) fn set_final_proposal_step(&mut self, step: f64) {
        self.final_step = Some(step);
    }

    /// Number of recorded iterations.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn num_bins(&self) -> usize {
        self.bins
    }

    /// Bin edges `e_0..e_N`; empty for traces read from CSV.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn theta(&self, iteration: usize) -> &[f64] {
        &self.theta[iteration * self.bins..(iteration + 1) * self.bins]
    }

    /// `θ_k` across all iterations (`k` 0-based).
    pub fn theta_series(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.theta.iter().skip(k).step_by(self.bins).copied()
    }

    pub fn zeta(&self, iteration: usize) -> Option<&[f64]> {
        let width = self.bins - 1;
        self.zeta.get(iteration * width..(iteration + 1) * width)
    }

    pub fn eta_v(&self) -> &[f64] {
        &self.eta_v
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Number of adaptation (burn-in) iterations the sampler used.
    pub fn burnin(&self) -> usize {
        self.burnin
    }

    /// `α` proposal standard deviation after adaptation.
    pub fn final_proposal_step(&self) -> Option<f64> {
        self.final_step
    }

    pub fn acceptance_count(&self) -> Option<usize> {
        (!self.accepted.is_empty()).then(|| self.accepted.iter().filter(|&&a| a).count())
    }

    /// Fraction of accepted `α` proposals over the whole run.
    pub fn acceptance_rate(&self) -> Option<f64> {
        self.acceptance_rate_from(0)
    }

    /// Fraction of accepted `α` proposals once the proposal has been frozen.
    pub fn post_burnin_acceptance_rate(&self) -> Option<f64> {
        self.acceptance_rate_from(self.burnin)
    }

    fn acceptance_rate_from(&self, start: usize) -> Option<f64> {
        let tail = self.accepted.get(start..)?;
        if tail.is_empty() {
            return None;
        }
        Some(tail.iter().filter(|&&a| a).count() as f64 / tail.len() as f64)
    }

    /// Header `iter,alpha,eta_v,theta_1,…,theta_N`, one row per iteration.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["iter".to_string(), "alpha".into(), "eta_v".into()];
        header.extend((1..=self.bins).map(|k| format!("theta_{k}")));
        wtr.write_record(&header)?;
        let mut row = Vec::with_capacity(self.bins + 3);
        for it in 0..self.len() {
            row.clear();
            row.push((it + 1).to_string());
            row.push(fmt_f64(self.alpha[it]));
            row.push(fmt_f64(self.eta_v[it]));
            row.extend(self.theta(it).iter().map(|&t| fmt_f64(t)));
            wtr.write_record(&row)?;
        }
        wtr.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let bins = headers.len().saturating_sub(3);
        let expected_prefix = ["iter", "alpha", "eta_v"];
        let ok = bins >= 2
            && headers.iter().take(3).eq(expected_prefix)
            && headers.iter().skip(3).enumerate().all(|(k, h)| h == format!("theta_{}", k + 1));
        if !ok {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `iter,alpha,eta_v,theta_1,...,theta_N` with N >= 2".into(),
            });
        }
        let mut trace = Trace {
            bins,
            edges: Vec::new(),
            theta: Vec::new(),
            zeta: Vec::new(),
            eta_v: Vec::new(),
            alpha: Vec::new(),
            accepted: Vec::new(),
            burnin: 0,
            final_step: None,
        };
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(row as u64 + 2, |p| p.line());
            let parse = |raw: &str| -> Result<f64> {
                raw.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad number `{raw}`: {e}"),
                })
            };
            trace.alpha.push(parse(&record[1])?);
            trace.eta_v.push(parse(&record[2])?);
            for k in 0..bins {
                trace.theta.push(parse(&record[3 + k])?);
            }
        }
        Ok(trace)
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

    /// Trace built from explicit `θ` draws, one `Vec` per iteration.
    pub fn from_theta(theta: Vec<Vec<f64>>) -> Result<Self> {
        let bins = theta.first().map_or(0, Vec::len);
        if bins < 2 || theta.iter().any(|row| row.len() != bins) {
            return Err(Error::Shape("every iteration needs the same number (>= 2) of bins".into()));
        }
        let len = theta.len();
        Ok(Trace {
            bins,
            edges: Vec::new(),
            theta: theta.into_iter().flatten().collect(),
            zeta: Vec::new(),
            eta_v: vec![f64::NAN; len],
            alpha: vec![f64::NAN; len],
            accepted: Vec::new(),
            burnin: 0,
            final_step: None,
        })
    }
}
