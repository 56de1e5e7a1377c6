use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::allocation::{validate_allocation, Allocation};
use super::channel::{render_column, BitVector, LdParams};
pub use super::engine::{BlockTrace, RelayNode};
use super::engine::{Cat, Scheme, SchemeRun};
use crate::{Error, Result};

/// Bit counts split by signal category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub cf: usize,
    pub cn: usize,
    pub df: usize,
}

impl CategoryCounts {
    pub fn total(&self) -> usize {
        self.cf + self.cn + self.df
    }

    fn bump(&mut self, cat: Cat) {
        match cat {
            Cat::Cf => self.cf += 1,
            Cat::Cn => self.cn += 1,
            Cat::Df => self.df += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub params: LdParams,
    pub blocks: usize,
    pub seed: u64,
    /// Bits each user is sent per block, by category.
    pub per_block: [CategoryCounts; 2],
    /// Bits each user decoded correctly over the whole run.
    pub delivered: [CategoryCounts; 2],
    /// Bits decoded wrongly or not at all.
    pub errors: usize,
    /// Relay slots that could not be decoded in time.
    pub relay_misses: usize,
}

impl SimReport {
    pub fn delivered_total(&self) -> usize {
        self.delivered.iter().map(CategoryCounts::total).sum()
    }

    /// Delivered bits per block in units of n_d.
    pub fn normalized_gdof(&self) -> f64 {
        self.delivered_total() as f64 / (self.blocks * self.params.n_d) as f64
    }
}

/// Per-block text diagrams of one run.
#[derive(Debug, Clone, Default)]
pub struct SimTrace {
    pub blocks: Vec<BlockTrace>,
}

fn section(out: &mut String, title: &str, x: &BitVector, labels: &[String]) {
    let _ = writeln!(out, "  {title}");
    for line in render_column(x, Some(labels)).lines() {
        let _ = writeln!(out, "    {line}");
    }
}

impl SimTrace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let _ = writeln!(out, "block {}", b.block);
            section(&mut out, "TX1", &b.tx[0], &b.tx_labels[0]);
            section(&mut out, "TX2", &b.tx[1], &b.tx_labels[1]);
            section(&mut out, "relay in", &b.relay_rx, &b.relay_rx_labels);
            section(&mut out, "relay out", &b.relay_tx, &b.relay_tx_labels);
            section(&mut out, "RX1", &b.rx[0], &b.rx_labels[0]);
            section(&mut out, "RX2", &b.rx[1], &b.rx_labels[1]);
        }
        out
    }
}

fn run(
    p: &LdParams,
    a: &Allocation,
    blocks: usize,
    seed: u64,
    trace: bool,
) -> Result<(SimReport, SimTrace)> {
    if blocks < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 blocks, got {blocks}"
        )));
    }
    let scheme = Scheme::new(*p, a.clone(), blocks);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<bool> = (0..scheme.num_vars()).map(|_| rng.random()).collect();
    let outcome = SchemeRun::execute(&scheme, &values, trace);

    let per_user = CategoryCounts {
        cf: a.cf_count(),
        cn: a.cn_count(),
        df: a.df_count(),
    };
    let mut delivered = [CategoryCounts::default(); 2];
    let mut errors = 0;
    for (j, decoded) in outcome.decoded.iter().enumerate() {
        for &(_, cat, var, v) in decoded {
            if v == Some(values[var]) {
                delivered[j].bump(cat);
            } else {
                errors += 1;
            }
        }
    }
    let report = SimReport {
        params: *p,
        blocks,
        seed,
        per_block: [per_user; 2],
        delivered,
        errors,
        relay_misses: outcome.relay_misses,
    };
    Ok((
        report,
        SimTrace {
            blocks: outcome.trace,
        },
    ))
}

fn checked(p: &LdParams, a: &Allocation) -> Result<()> {
    match validate_allocation(a, p).failure {
        Some(f) => Err(Error::InvalidAllocation(f)),
        None => Ok(()),
    }
}

/// Runs the block-Markov scheme over `blocks` message blocks with uniform
/// random messages drawn from `seed`.
pub fn simulate(p: &LdParams, a: &Allocation, blocks: usize, seed: u64) -> Result<SimReport> {
    checked(p, a)?;
    run(p, a, blocks, seed, false).map(|r| r.0)
}

/// [`simulate`] with per-block diagrams.
pub fn simulate_traced(
    p: &LdParams,
    a: &Allocation,
    blocks: usize,
    seed: u64,
) -> Result<(SimReport, SimTrace)> {
    checked(p, a)?;
    run(p, a, blocks, seed, true)
}

/// Runs without validating the allocation first; failures show up as
/// decoding errors in the report. Structural problems that make the
/// layout unrepresentable (levels beyond q) are still rejected.
pub fn simulate_unchecked(
    p: &LdParams,
    a: &Allocation,
    blocks: usize,
    seed: u64,
) -> Result<SimReport> {
    let q = p.q();
    let r = &a.relay;
    let levels =
        a.tx.iter()
            .flat_map(|t| {
                t.cf.iter()
                    .chain(&t.cn_current)
                    .chain(&t.df)
                    .chain(&t.cn_future)
            })
            .chain(
                r.df[0]
                    .iter()
                    .chain(&r.df[1])
                    .chain(&r.cf_sum)
                    .chain(&r.cn_sum),
            );
    for &level in levels {
        if level == 0 || level > q {
            return Err(Error::LevelOutOfRange { level, q });
        }
    }
    if a.tx[0].cf.len() != a.tx[1].cf.len()
        || a.tx[0].cn_current.len() != a.tx[1].cn_current.len()
        || a.tx[0].df.len() != a.tx[1].df.len()
    {
        return Err(Error::InvalidParams(
            "both users must use the same category sizes".into(),
        ));
    }
    run(p, a, blocks, seed, false).map(|r| r.0)
}
