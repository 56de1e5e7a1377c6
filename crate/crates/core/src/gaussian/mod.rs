//! The Gaussian IRC and the lattice-based CN/CF/DF scheme.
//!
//! Signals are described only through their powers; the scheme's rate
//! constraints are evaluated in closed form and maximized numerically.

mod bound;
mod optimize;
mod rates;

use serde::{Deserialize, Serialize};

use crate::gdof::GdofParams;
use crate::{Error, Result};

pub use bound::upper_bound_sumrate;
pub use optimize::{
    estimate_gdof, optimize_powers, GdofEstimate, OptimizeResult, OptimizerConfig, SnrPoint,
};
pub use rates::{
    achievable_sum_rate, destination_constraints, relay_constraints, DestinationCaps,
    RateAllocation, RelayCaps,
};

/// Largest number of CN or CF splits accepted.
pub const MAX_SPLITS: usize = 8;

/// Relative slack tolerated on the power budgets, absorbing the rounding
/// of long sums.
const BUDGET_SLACK: f64 = 1e-12;

/// Real gains and the per-node power budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianChannel {
    pub h_d: f64,
    pub h_c: f64,
    pub h_r: f64,
    pub h_s: f64,
    pub power: f64,
}

impl GaussianChannel {
    pub fn new(h_d: f64, h_c: f64, h_r: f64, h_s: f64, power: f64) -> Result<Self> {
        for (name, g) in [("h_d", h_d), ("h_c", h_c), ("h_r", h_r), ("h_s", h_s)] {
            if !g.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite, got {g}"
                )));
            }
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "power budget must be positive and finite, got {power}"
            )));
        }
        Ok(Self {
            h_d,
            h_c,
            h_r,
            h_s,
            power,
        })
    }

    /// Gains for which `h_x²·P = snr^x` holds exactly, with `P = snr` and
    /// `h_d = 1`.
    pub fn from_exponents(pattern: &GdofParams, snr: f64) -> Result<Self> {
        if !(snr > 1.0 && snr.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "snr must exceed 1, got {snr}"
            )));
        }
        let gain = |x: f64| snr.powf((x - 1.0) / 2.0);
        Self::new(
            1.0,
            gain(pattern.alpha),
            gain(pattern.beta),
            gain(pattern.gamma),
            snr,
        )
    }

    /// `P·h_d²`.
    pub fn snr(&self) -> f64 {
        self.power * self.h_d * self.h_d
    }

    /// (α, β, γ) at this power. Needs `P·h_d² > 1`.
    pub fn exponents(&self) -> Result<GdofParams> {
        let snr = self.snr();
        if !(snr > 1.0) {
            return Err(Error::DegenerateChannel(format!(
                "exponents need P*h_d^2 > 1, got {snr}"
            )));
        }
        let e = |h: f64| ((h * h * self.power).ln() / snr.ln()).max(0.0);
        GdofParams::new(e(self.h_c), e(self.h_r), e(self.h_s))
    }

    pub fn is_strong_interference(&self) -> bool {
        self.h_c * self.h_c > self.h_d * self.h_d
    }

    /// Whether the destinations decode the interferer's first CF split
    /// before the relay's CF signal, which is the case when the cross link
    /// is stronger than the relay link.
    pub fn cross_cf_first(&self) -> bool {
        self.h_c.abs() > self.h_r.abs()
    }
}

/// Power split of one transmitter (both use the same) and of the relay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    /// Current CN split powers, non-increasing.
    pub cn: Vec<f64>,
    /// Future CN split powers.
    pub cn_future: Vec<f64>,
    pub cf: Vec<f64>,
    pub df: f64,
    pub cm: f64,
    pub relay_cf: f64,
    pub relay_df: f64,
}

impl PowerAllocation {
    pub fn zeros(cn_splits: usize, cf_splits: usize) -> Self {
        Self {
            cn: vec![0.0; cn_splits],
            cn_future: vec![0.0; cn_splits],
            cf: vec![0.0; cf_splits],
            df: 0.0,
            cm: 0.0,
            relay_cf: 0.0,
            relay_df: 0.0,
        }
    }

    pub fn cn_splits(&self) -> usize {
        self.cn.len()
    }

    pub fn cf_splits(&self) -> usize {
        self.cf.len()
    }

    pub fn tx_total(&self) -> f64 {
        self.cn
            .iter()
            .chain(&self.cn_future)
            .chain(&self.cf)
            .sum::<f64>()
            + self.df
            + self.cm
    }

    /// Relay power spent on neutralization, `(h_c²/h_r²)·ΣP_cn`.
    pub fn relay_cn(&self, ch: &GaussianChannel) -> f64 {
        relay_cn_power(ch, self.cn.iter().sum())
    }

    pub fn relay_total(&self, ch: &GaussianChannel) -> f64 {
        self.relay_cf + self.relay_df + self.relay_cn(ch)
    }

    /// Every component finite and non-negative, matching split counts,
    /// non-increasing CN powers and both budgets.
    pub fn check(&self, ch: &GaussianChannel) -> Result<()> {
        if self.cn.len() != self.cn_future.len() {
            return Err(Error::InvalidParams(format!(
                "{} current CN powers but {} future ones",
                self.cn.len(),
                self.cn_future.len()
            )));
        }
        if self.cn.len() > MAX_SPLITS || self.cf.len() > MAX_SPLITS {
            return Err(Error::InvalidParams(format!(
                "at most {MAX_SPLITS} CN and CF splits are supported"
            )));
        }
        let scalars = [self.df, self.cm, self.relay_cf, self.relay_df];
        let all = self
            .cn
            .iter()
            .chain(&self.cn_future)
            .chain(&self.cf)
            .chain(&scalars);
        if let Some(v) = all.copied().find(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParams(format!(
                "powers must be finite and non-negative, got {v}"
            )));
        }
        if self.cn.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParams(
                "CN split powers must be non-increasing".into(),
            ));
        }
        let limit = ch.power * (1.0 + BUDGET_SLACK);
        let used = self.tx_total();
        if used > limit {
            return Err(Error::BudgetViolation {
                node: "transmitter",
                used,
                budget: ch.power,
            });
        }
        let used = self.relay_total(ch);
        if !(used <= limit) {
            return Err(Error::BudgetViolation {
                node: "relay",
                used,
                budget: ch.power,
            });
        }
        Ok(())
    }
}

fn relay_cn_power(ch: &GaussianChannel, cn_total: f64) -> f64 {
    if cn_total == 0.0 {
        0.0
    } else {
        ch.h_c * ch.h_c / (ch.h_r * ch.h_r) * cn_total
    }
}
