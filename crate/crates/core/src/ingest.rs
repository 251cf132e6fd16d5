//! Tick-data ingestion: parse delimited quote files, thin them, and turn
//! log bid prices on a rescaled time axis into [`Observations`].

use std::io::{Read, Write};

use chrono::{NaiveDateTime, NaiveTime};

use crate::error::{Error, Result};
use crate::model::Observations;

/// Column layout of a tick file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TickFormat {
    pub delimiter: u8,
    pub has_header: bool,
    pub time_col: usize,
    pub bid_col: usize,
    pub ask_col: Option<usize>,
    /// `chrono` format string for the timestamp column.
    pub time_format: String,
}

impl Default for TickFormat {
    /// `SYMBOL,YYYYMMDD HH:MM:SS.fff,bid,ask` without header.
    fn default() -> Self {
        TickFormat {
            delimiter: b',',
            has_header: false,
            time_col: 1,
            bid_col: 2,
            ask_col: Some(3),
            time_format: "%Y%m%d %H:%M:%S%.f".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub time: NaiveDateTime,
    pub bid: f64,
    pub ask: Option<f64>,
}

/// Quotes sorted by strictly increasing timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSeries {
    ticks: Vec<Tick>,
    header: Option<Vec<String>>,
}

impl TickSeries {
    pub fn new(mut ticks: Vec<Tick>) -> Result<Self> {
        if ticks.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(t) = ticks.iter().find(|t| !(t.bid > 0.0) || t.ask.is_some_and(|a| !(a > 0.0))) {
            return Err(Error::Validation(format!("nonpositive price at {}", t.time)));
        }
        // Stable sort, then keep the last row of every run of equal timestamps.
        ticks.sort_by_key(|t| t.time);
        let mut out: Vec<Tick> = Vec::with_capacity(ticks.len());
        for t in ticks {
            match out.last_mut() {
                Some(last) if last.time == t.time => *last = t,
                _ => out.push(t),
            }
        }
        Ok(TickSeries { ticks: out, header: None })
    }

    pub fn ticks(&self) -> &[Tick] {
        &self.ticks
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }
}

/// Parses a tick file. Rows are sorted by timestamp and duplicate
/// timestamps collapse to the row appearing last in the input.
pub fn parse_ticks<R: Read>(input: R, format: &TickFormat) -> Result<TickSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(format.has_header)
        .flexible(true)
        .from_reader(input);
    let header = if format.has_header {
        Some(rdr.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };
    let mut ticks = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize| {
            record.get(col).map(str::trim).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing column {col}"),
            })
        };
        let raw_time = field(format.time_col)?;
        let time = NaiveDateTime::parse_from_str(raw_time, &format.time_format).map_err(|e| Error::Parse {
            line,
            message: format!("bad timestamp `{raw_time}`: {e}"),
        })?;
        let price = |col: usize| -> Result<f64> {
            let raw = field(col)?;
            let v: f64 = raw.parse().map_err(|e| Error::Parse {
                line,
                message: format!("bad price `{raw}`: {e}"),
            })?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("line {line}: nonpositive price {v}")));
            }
            Ok(v)
        };
        let bid = price(format.bid_col)?;
        let ask = format.ask_col.map(price).transpose()?;
        ticks.push(Tick { time, bid, ask });
    }
    let mut series = TickSeries::new(ticks)?;
    series.header = header;
    Ok(series)
}

/// Writes ticks back in `format`. Columns the format does not map are left
/// empty.
pub fn write_ticks<W: Write>(series: &TickSeries, format: &TickFormat, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(format.delimiter)
        .flexible(true)
        .from_writer(writer);
    if format.has_header {
        if let Some(h) = &series.header {
            wtr.write_record(h)?;
        }
    }
    let width = [Some(format.time_col), Some(format.bid_col), format.ask_col]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(0)
        + 1;
    let mut row = vec![String::new(); width];
    for t in &series.ticks {
        row.iter_mut().for_each(String::clear);
        row[format.time_col] = t.time.format(&format.time_format).to_string();
        row[format.bid_col] = t.bid.to_string();
        if let (Some(col), Some(ask)) = (format.ask_col, t.ask) {
            row[col] = ask.to_string();
        }
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Keeps rows `0, k, 2k, …`.
pub fn subsample_every(series: &TickSeries, k: usize) -> Result<TickSeries> {
    if k == 0 {
        return Err(Error::Domain("subsampling step must be at least 1".into()));
    }
    Ok(TickSeries {
        ticks: series.ticks.iter().step_by(k).copied().collect(),
        header: series.header.clone(),
    })
}

/// How clock time is mapped onto the model's time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeAnchor {
    /// First tick maps to 0 and last tick to 1.
    #[default]
    FirstTick,
    /// Midnight of the first tick's date maps to 0 and the following
    /// midnight to 1.
    CalendarDay,
}

/// Log bid prices on the rescaled time axis.
///
/// The anchor time is `t_0 = 0`. A tick sitting exactly on the anchor (always
/// the case for [`TimeAnchor::FirstTick`]) pins the start of the axis and
/// is not itself an observation; every later tick is.
pub fn to_observations(series: &TickSeries, anchor: TimeAnchor) -> Result<Observations> {
    let first = series.ticks.first().ok_or(Error::EmptySeries)?;
    let last = series.ticks[series.len() - 1];
    let start = match anchor {
        TimeAnchor::FirstTick => first.time,
        TimeAnchor::CalendarDay => first.time.date().and_time(NaiveTime::MIN),
    };
    let window = match anchor {
        TimeAnchor::FirstTick => last.time - start,
        TimeAnchor::CalendarDay => chrono::Duration::days(1),
    };
    let window_ns = window
        .num_nanoseconds()
        .ok_or_else(|| Error::Validation("time window too long".into()))? as f64;
    if !(window_ns > 0.0) {
        return Err(Error::Validation("ticks span no time".into()));
    }
    let mut times = vec![0.0];
    let mut values = Vec::with_capacity(series.len());
    for t in series.ticks.iter().filter(|t| t.time > start) {
        if !(t.bid > 0.0) {
            return Err(Error::Validation(format!("nonpositive bid at {}", t.time)));
        }
        let ns = (t.time - start).num_nanoseconds().unwrap_or(i64::MAX) as f64;
        times.push(ns / window_ns);
        values.push(t.bid.ln());
    }
    Observations::new(times, values)
}
