//! CSV serialization of measurement records.
//!
//! Schemas (headers are part of the interface):
//! - errors:  `scheme,model,N,M,err_v,se_v,err_x,se_x,seed`
//! - rates:   `scheme,model,target,slope,intercept,fit_min_N,fit_max_N`
//! - bias:    `payoff,scheme,model,N,bias,se,seed`
//! - plot:    `scheme,model,log2_N,log2_err_v,log2_err_x`
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the records exactly and identical runs produce byte-identical
//! files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::convergence::{ErrorRecord, RateEstimate};
use crate::error::Result;
use crate::payoff::BiasPoint;

/// One fitted rate, as stored in the rates CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub scheme: String,
    pub model: String,
    /// `cir` or `heston`.
    pub target: String,
    pub slope: f64,
    pub intercept: f64,
    #[serde(rename = "fit_min_N")]
    pub fit_min_n: usize,
    #[serde(rename = "fit_max_N")]
    pub fit_max_n: usize,
}

impl RateRow {
    pub fn from_estimate(
        scheme: &str,
        model: &str,
        target: &str,
        est: &RateEstimate,
    ) -> RateRow {
        RateRow {
            scheme: scheme.to_string(),
            model: model.to_string(),
            target: target.to_string(),
            slope: est.slope,
            intercept: est.intercept,
            fit_min_n: est.fit_range.iter().copied().min().unwrap_or(0),
            fit_max_n: est.fit_range.iter().copied().max().unwrap_or(0),
        }
    }
}

/// One bias measurement, as stored in the bias CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRecord {
    pub payoff: String,
    pub scheme: String,
    pub model: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub bias: f64,
    pub se: f64,
    pub seed: u64,
}

impl BiasRecord {
    pub fn from_point(
        payoff: &str,
        scheme: &str,
        model: &str,
        seed: u64,
        point: &BiasPoint,
    ) -> BiasRecord {
        BiasRecord {
            payoff: payoff.to_string(),
            scheme: scheme.to_string(),
            model: model.to_string(),
            n: point.n,
            bias: point.bias,
            se: point.se,
            seed,
        }
    }
}

/// Log-log coordinates of an error record, for plotting. Rows with zero
/// error are skipped (their logarithm is not finite).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub scheme: String,
    pub model: String,
    #[serde(rename = "log2_N")]
    pub log2_n: f64,
    pub log2_err_v: f64,
    pub log2_err_x: f64,
}

pub fn plot_rows(records: &[ErrorRecord]) -> Vec<PlotRow> {
    records
        .iter()
        .filter(|r| r.err_v > 0.0 && r.err_x > 0.0)
        .map(|r| PlotRow {
            scheme: r.scheme.clone(),
            model: r.model.clone(),
            log2_n: (r.n as f64).log2(),
            log2_err_v: r.err_v.log2(),
            log2_err_x: r.err_x.log2(),
        })
        .collect()
}

fn write_csv<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn read_csv<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_error_records<W: Write>(w: W, records: &[ErrorRecord]) -> Result<()> {
    write_csv(w, records)
}

pub fn read_error_records<R: Read>(r: R) -> Result<Vec<ErrorRecord>> {
    read_csv(r)
}

pub fn write_error_csv<P: AsRef<Path>>(path: P, records: &[ErrorRecord]) -> Result<()> {
    write_error_records(File::create(path)?, records)
}

pub fn read_error_csv<P: AsRef<Path>>(path: P) -> Result<Vec<ErrorRecord>> {
    read_error_records(File::open(path)?)
}

pub fn write_rate_rows<W: Write>(w: W, rows: &[RateRow]) -> Result<()> {
    write_csv(w, rows)
}

pub fn write_rates_csv<P: AsRef<Path>>(path: P, rows: &[RateRow]) -> Result<()> {
    write_rate_rows(File::create(path)?, rows)
}

pub fn read_rates_csv<P: AsRef<Path>>(path: P) -> Result<Vec<RateRow>> {
    read_csv(File::open(path)?)
}

pub fn write_bias_records<W: Write>(w: W, rows: &[BiasRecord]) -> Result<()> {
    write_csv(w, rows)
}

pub fn write_bias_csv<P: AsRef<Path>>(path: P, rows: &[BiasRecord]) -> Result<()> {
    write_bias_records(File::create(path)?, rows)
}

pub fn read_bias_csv<P: AsRef<Path>>(path: P) -> Result<Vec<BiasRecord>> {
    read_csv(File::open(path)?)
}

pub fn write_plot_rows<W: Write>(w: W, rows: &[PlotRow]) -> Result<()> {
    write_csv(w, rows)
}

pub fn write_plot_csv<P: AsRef<Path>>(path: P, rows: &[PlotRow]) -> Result<()> {
    write_plot_rows(File::create(path)?, rows)
}
