//! Experiment reports: per-trial records plus aggregates, emitted as CSV
//! (header row mandatory, `#` comment lines for metadata) or JSON (one
//! object per trial plus an aggregate object). Aggregates are always
//! recomputable from the trial records.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub trait Record: Serialize {
    fn csv_header() -> &'static [&'static str];
    fn csv_row(&self) -> Vec<String>;
}

#[derive(Clone, Debug)]
pub struct Report<R: Record> {
    pub experiment: String,
    pub params: Vec<(String, String)>,
    pub trials: Vec<R>,
    pub aggregates: Vec<(String, f64)>,
}

impl<R: Record> Report<R> {
    pub fn aggregate(&self, name: &str) -> Option<f64> {
        self.aggregates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn write<W: Write>(&self, format: Format, w: W) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# experiment: {}", self.experiment)?;
        for (k, v) in &self.params {
            writeln!(w, "# param: {k}={v}")?;
        }
        writeln!(w, "{}", R::csv_header().join(","))?;
        for trial in &self.trials {
            writeln!(w, "{}", trial.csv_row().join(","))?;
        }
        for (k, v) in &self.aggregates {
            writeln!(w, "# aggregate: {k}={v}")?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let aggregates: Map<String, Value> = self
            .aggregates
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        let trials: Vec<Value> = self
            .trials
            .iter()
            .map(|t| serde_json::to_value(t).expect("records serialize"))
            .collect();
        let root = serde_json::json!({
            "experiment": self.experiment,
            "params": params,
            "trials": trials,
            "aggregates": aggregates,
        });
        serde_json::to_writer_pretty(&mut w, &root)?;
        writeln!(w)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn stddev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Nearest-rank percentile, `q` in `(0, 1]`.
pub fn percentile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}
