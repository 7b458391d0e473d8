use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// One long-format result row: a single metric for one design cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub model: String,
    pub n: usize,
    /// Noise level λ, noise sd, or covariate count, depending on the study.
    pub param: f64,
    pub method: String,
    pub metric: String,
    pub value: f64,
    pub mc_se: f64,
    pub reps: usize,
    /// Histogram bin edges, set only for `metric = "hist_count"` rows.
    pub bin_lo: Option<f64>,
    pub bin_hi: Option<f64>,
    pub note: Option<String>,
}

impl ReportRow {
    pub fn new(model: &str, n: usize, param: f64, method: &str, metric: &str) -> Self {
        Self {
            model: model.to_string(),
            n,
            param,
            method: method.to_string(),
            metric: metric.to_string(),
            value: 0.0,
            mc_se: 0.0,
            reps: 1,
            bin_lo: None,
            bin_hi: None,
            note: None,
        }
    }

    pub fn value(mut self, value: f64, mc_se: f64, reps: usize) -> Self {
        self.value = value;
        self.mc_se = mc_se;
        self.reps = reps;
        if reps == 1 && self.note.is_none() {
            self.note = Some("single_replicate".into());
        }
        self
    }

    pub fn bin(mut self, lo: f64, hi: f64) -> Self {
        self.bin_lo = Some(lo);
        self.bin_hi = Some(hi);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ExperimentReport {
    pub study: String,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn new(study: &str) -> Self {
        Self {
            study: study.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ExperimentReport) {
        self.rows.extend(other.rows);
    }

    /// First row matching `(model, method, metric)`.
    pub fn find(&self, model: &str, method: &str, metric: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.method == method && r.metric == metric)
    }

    pub fn rows_with_metric<'a>(&'a self, metric: &'a str) -> impl Iterator<Item = &'a ReportRow> {
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    /// CSV with a header row; optional fields are left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(io_error)?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "model", "n", "param", "method", "metric", "value", "mc_se", "reps", "bin_lo",
                "bin_hi", "note",
            ])
            .map_err(io_error)?;
        }
        w.flush()
            .map_err(|e| Error::Input(format!("write failed: {e}")))
    }

    /// One JSON object per row.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.rows {
            let line = serde_json::to_string(row).map_err(|e| Error::Input(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| Error::Input(format!("write failed: {e}")))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Input(e.to_string()))
    }
}

fn io_error(e: csv::Error) -> Error {
    Error::Input(format!("csv write failed: {e}"))
}
