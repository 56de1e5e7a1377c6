//! WebAssembly entry points for the static demo page in `www/`.
//!
//! Each operation takes plain numbers and returns a JSON string, so the
//! page needs nothing beyond `JSON.parse`.

use irclab::gaussian::{optimize_powers, upper_bound_sumrate, GaussianChannel, OptimizerConfig};
use irclab::gdof::{sweep, AlphaGrid, GdofParams};
use irclab::ld::{construct_allocation, simulate_traced, toy_allocation, LdParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

pub const MAX_BLOCKS: usize = 40;
pub const MAX_LEVEL: usize = 12;

#[derive(Serialize)]
struct SweepPoint {
    alpha: f64,
    bound_new: f64,
    bound_known: f64,
    gdof_irc: Option<f64>,
    gdof_ic: f64,
    min_bound: f64,
    binding: &'static str,
    regime: &'static str,
}

#[derive(Serialize)]
struct LdRun {
    bits_per_block: usize,
    delivered: usize,
    errors: usize,
    normalized_gdof: f64,
    target_gdof: Option<f64>,
    trace: String,
}

#[derive(Serialize)]
struct GaussPoint {
    snr_db: f64,
    sum_rate: f64,
    upper_bound: f64,
    binding: Vec<String>,
    cn: Vec<f64>,
    cn_future: Vec<f64>,
    cf: Vec<f64>,
    df: f64,
    cm: f64,
    relay_cf: f64,
    relay_df: f64,
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Bounds and GDoF along α ∈ [0, γ + 1] for fixed β, γ.
pub fn sweep_points(beta: f64, gamma: f64, step: f64) -> Result<String, String> {
    let pts =
        sweep(AlphaGrid::new(0.0, gamma + 1.0, step), beta, gamma).map_err(|e| e.to_string())?;
    json(
        &pts.iter()
            .map(|p| SweepPoint {
                alpha: p.params.alpha,
                bound_new: p.bound_new,
                bound_known: p.bound_known,
                gdof_irc: p.gdof_irc,
                gdof_ic: p.gdof_ic,
                min_bound: p.min_bound(),
                binding: p.binding_term.label(),
                regime: p.regime.label(),
            })
            .collect::<Vec<_>>(),
    )
}

/// Simulates the LD scheme and returns the per-block diagrams.
pub fn ld_run(levels: [usize; 4], blocks: usize, seed: u64) -> Result<String, String> {
    if levels.iter().any(|&n| n > MAX_LEVEL) {
        return Err(format!("levels are limited to {MAX_LEVEL} in the demo"));
    }
    if blocks > MAX_BLOCKS {
        return Err(format!("at most {MAX_BLOCKS} blocks in the demo"));
    }
    let [n_d, n_c, n_r, n_s] = levels;
    let p = LdParams::new(n_d, n_c, n_r, n_s).map_err(|e| e.to_string())?;
    let a = if levels == [2, 3, 6, 5] {
        toy_allocation()
    } else {
        construct_allocation(&p).map_err(|e| e.to_string())?
    };
    let (r, trace) = simulate_traced(&p, &a, blocks, seed).map_err(|e| e.to_string())?;
    json(&LdRun {
        bits_per_block: a.bits_per_block(),
        delivered: r.delivered_total(),
        errors: r.errors,
        normalized_gdof: r.normalized_gdof(),
        target_gdof: p.exponents().and_then(|g| irclab::gdof::gdof_irc(&g).ok()),
        trace: trace.render(),
    })
}

/// Optimizes the Gaussian scheme for the exponent pattern at one SNR.
pub fn gauss_point(
    pattern: [f64; 3],
    snr_db: f64,
    cn_splits: usize,
    cf_splits: usize,
) -> Result<String, String> {
    let [alpha, beta, gamma] = pattern;
    let g = GdofParams::new(alpha, beta, gamma).map_err(|e| e.to_string())?;
    let ch = GaussianChannel::from_exponents(&g, 10f64.powf(snr_db / 10.0))
        .map_err(|e| e.to_string())?;
    let cfg = OptimizerConfig {
        cn_splits,
        cf_splits,
        ..Default::default()
    };
    let opt = optimize_powers(&ch, &cfg).map_err(|e| e.to_string())?;
    let p = opt.powers;
    json(&GaussPoint {
        snr_db,
        sum_rate: opt.rates.sum_rate,
        upper_bound: upper_bound_sumrate(&ch).map_err(|e| e.to_string())?,
        binding: opt.rates.binding,
        cn: p.cn,
        cn_future: p.cn_future,
        cf: p.cf,
        df: p.df,
        cm: p.cm,
        relay_cf: p.relay_cf,
        relay_df: p.relay_df,
    })
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gdofSweep)]
pub fn gdof_sweep(beta: f64, gamma: f64, step: f64) -> Result<String, JsError> {
    js(sweep_points(beta, gamma, step))
}

#[wasm_bindgen(js_name = ldSimulate)]
pub fn ld_simulate(
    n_d: usize,
    n_c: usize,
    n_r: usize,
    n_s: usize,
    blocks: usize,
    seed: u32,
) -> Result<String, JsError> {
    js(ld_run([n_d, n_c, n_r, n_s], blocks, seed.into()))
}

#[wasm_bindgen(js_name = gaussOptimize)]
pub fn gauss_optimize(
    alpha: f64,
    beta: f64,
    gamma: f64,
    snr_db: f64,
    cn_splits: usize,
    cf_splits: usize,
) -> Result<String, JsError> {
    js(gauss_point(
        [alpha, beta, gamma],
        snr_db,
        cn_splits,
        cf_splits,
    ))
}
