//! CSV rows for every experiment, with fixed headers.
//!
//! Floats are written in Rust's shortest round-trip form, so parsing a row
//! back yields bit-identical values. List-valued columns join their
//! entries with `;`.

use std::io::{Read, Write};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::gaussian::{GaussianChannel, GdofEstimate, OptimizeResult, PowerAllocation};
use crate::gdof::{BoundTerm, GdofParams, GdofPoint, Regime};
use crate::ld::SimReport;
use crate::{Error, Result};

fn write_rows<W: Write, T: Serialize>(out: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

fn read_rows<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// One point of a bounds evaluation or α-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdofRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub bound_new: f64,
    pub bound_known: f64,
    pub gdof_irc: Option<f64>,
    pub gdof_ic: f64,
    pub min_bound: f64,
    pub binding_term: String,
    pub regime: String,
}

impl From<&GdofPoint> for GdofRow {
    fn from(p: &GdofPoint) -> Self {
        Self {
            alpha: p.params.alpha,
            beta: p.params.beta,
            gamma: p.params.gamma,
            bound_new: p.bound_new,
            bound_known: p.bound_known,
            gdof_irc: p.gdof_irc,
            gdof_ic: p.gdof_ic,
            min_bound: p.min_bound(),
            binding_term: p.binding_term.label().to_string(),
            regime: p.regime.label().to_string(),
        }
    }
}

impl TryFrom<GdofRow> for GdofPoint {
    type Error = Error;

    fn try_from(r: GdofRow) -> Result<Self> {
        let bad = |what: &str, v: &str| Error::Csv(format!("unknown {what} label {v:?}"));
        Ok(GdofPoint {
            params: GdofParams::new(r.alpha, r.beta, r.gamma)?,
            bound_new: r.bound_new,
            bound_known: r.bound_known,
            gdof_irc: r.gdof_irc,
            gdof_ic: r.gdof_ic,
            binding_term: BoundTerm::from_label(&r.binding_term)
                .ok_or_else(|| bad("bound term", &r.binding_term))?,
            regime: Regime::from_label(&r.regime).ok_or_else(|| bad("regime", &r.regime))?,
        })
    }
}

pub fn write_gdof_rows<W: Write>(out: W, points: &[GdofPoint]) -> Result<()> {
    write_rows(out, points.iter().map(GdofRow::from))
}

pub fn read_gdof_rows<R: Read>(input: R) -> Result<Vec<GdofPoint>> {
    read_rows::<R, GdofRow>(input)?
        .into_iter()
        .map(GdofPoint::try_from)
        .collect()
}

/// Summary of one LD simulation; bit counts are summed over both users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub n_d: usize,
    pub n_c: usize,
    pub n_r: usize,
    pub n_s: usize,
    pub blocks: usize,
    pub seed: u64,
    pub cf_bits: usize,
    pub cn_bits: usize,
    pub df_bits: usize,
    pub bits: usize,
    pub errors: usize,
    pub relay_misses: usize,
    pub normalized_gdof: f64,
}

impl From<&SimReport> for SimRow {
    fn from(r: &SimReport) -> Self {
        let [a, b] = r.delivered;
        Self {
            n_d: r.params.n_d,
            n_c: r.params.n_c,
            n_r: r.params.n_r,
            n_s: r.params.n_s,
            blocks: r.blocks,
            seed: r.seed,
            cf_bits: a.cf + b.cf,
            cn_bits: a.cn + b.cn,
            df_bits: a.df + b.df,
            bits: r.delivered_total(),
            errors: r.errors,
            relay_misses: r.relay_misses,
            normalized_gdof: r.normalized_gdof(),
        }
    }
}

pub fn write_sim_rows<W: Write>(out: W, reports: &[SimReport]) -> Result<()> {
    write_rows(out, reports.iter().map(SimRow::from))
}

pub fn read_sim_rows<R: Read>(input: R) -> Result<Vec<SimRow>> {
    read_rows(input)
}

/// One optimized operating point of the Gaussian scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussRow {
    pub snr_db: f64,
    pub sum_rate_bits: f64,
    pub upper_bound_bits: f64,
    pub p_cn: String,
    pub p_cn_future: String,
    pub p_cf: String,
    pub p_df: f64,
    pub p_cm: f64,
    pub p_relay_cf: f64,
    pub p_relay_df: f64,
    pub binding: String,
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

fn split(s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Csv(format!("bad number {v:?}")))
        })
        .collect()
}

impl GaussRow {
    pub fn new(ch: &GaussianChannel, upper_bound: f64, opt: &OptimizeResult) -> Self {
        let p = &opt.powers;
        Self {
            snr_db: 10.0 * ch.snr().log10(),
            sum_rate_bits: opt.rates.sum_rate,
            upper_bound_bits: upper_bound,
            p_cn: join(&p.cn),
            p_cn_future: join(&p.cn_future),
            p_cf: join(&p.cf),
            p_df: p.df,
            p_cm: p.cm,
            p_relay_cf: p.relay_cf,
            p_relay_df: p.relay_df,
            binding: opt.rates.binding.join(";"),
        }
    }

    pub fn powers(&self) -> Result<PowerAllocation> {
        Ok(PowerAllocation {
            cn: split(&self.p_cn)?,
            cn_future: split(&self.p_cn_future)?,
            cf: split(&self.p_cf)?,
            df: self.p_df,
            cm: self.p_cm,
            relay_cf: self.p_relay_cf,
            relay_df: self.p_relay_df,
        })
    }

    pub fn binding_labels(&self) -> Vec<&str> {
        self.binding.split(';').filter(|s| !s.is_empty()).collect()
    }
}

pub fn write_gauss_rows<W: Write>(out: W, rows: &[GaussRow]) -> Result<()> {
    write_rows(out, rows)
}

pub fn read_gauss_rows<R: Read>(input: R) -> Result<Vec<GaussRow>> {
    read_rows(input)
}

/// One SNR point of a slope estimate; the fitted line is repeated on
/// every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub snr_db: f64,
    pub sum_rate_bits: f64,
    pub upper_bound_bits: f64,
    pub slope: f64,
    pub intercept: f64,
}

pub fn estimate_rows(est: &GdofEstimate) -> Vec<EstimateRow> {
    est.points
        .iter()
        .map(|p| EstimateRow {
            snr_db: 10.0 * p.snr.log10(),
            sum_rate_bits: p.sum_rate,
            upper_bound_bits: p.upper_bound,
            slope: est.slope,
            intercept: est.intercept,
        })
        .collect()
}

pub fn write_estimate_rows<W: Write>(out: W, rows: &[EstimateRow]) -> Result<()> {
    write_rows(out, rows)
}

pub fn read_estimate_rows<R: Read>(input: R) -> Result<Vec<EstimateRow>> {
    read_rows(input)
}
