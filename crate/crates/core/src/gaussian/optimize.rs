//! Derivative-free maximization of the achievable sum rate.
//!
//! Every power is written as `P·snr^x` with an exponent `x ≤ 0`, so one
//! unit of `x` is one GDoF level. Seeds are layered exponent patterns of
//! the kind the GDoF analysis suggests (CF on top, CN splits stacked below
//! it one `α − 1` layer apart, future CN under the interference floor),
//! snapped to the grid and polished by coordinate ascent.

use serde::{Deserialize, Serialize};

use super::{
    achievable_sum_rate, relay_cn_power, upper_bound_sumrate, GaussianChannel, PowerAllocation,
    RateAllocation, MAX_SPLITS,
};
use crate::gdof::GdofParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// CN splits W.
    pub cn_splits: usize,
    /// CF splits L.
    pub cf_splits: usize,
    /// Exponent grid resolution, in GDoF levels.
    pub grid_step: f64,
    /// Coordinate ascent stops once a full sweep gains less than this many
    /// bits at the finest step.
    pub tol: f64,
    pub max_rounds: usize,
    /// Extra starting point, one exponent per coordinate in the order
    /// cn[W], cn_future[W], cf[L], df, cm, relay_cf, relay_df.
    pub seed_exponents: Option<Vec<f64>>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            cn_splits: 2,
            cf_splits: 2,
            grid_step: 0.1,
            tol: 1e-4,
            max_rounds: 500,
            seed_exponents: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cn_splits > MAX_SPLITS || self.cf_splits > MAX_SPLITS {
            return Err(Error::InvalidParams(format!(
                "at most {MAX_SPLITS} CN and CF splits are supported"
            )));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "grid step must lie in (0, 1], got {}",
                self.grid_step
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if let Some(seed) = &self.seed_exponents {
            if seed.len() != self.dims() {
                return Err(Error::InvalidParams(format!(
                    "seed needs {} exponents, got {}",
                    self.dims(),
                    seed.len()
                )));
            }
        }
        Ok(())
    }

    fn dims(&self) -> usize {
        2 * self.cn_splits + self.cf_splits + 4
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub powers: PowerAllocation,
    pub rates: RateAllocation,
    /// Achievable-sum-rate evaluations.
    pub evaluations: usize,
    /// Coordinate ascent sweeps over all seeds.
    pub rounds: usize,
    /// Gain of the last accepted coordinate ascent sweep, in bits.
    pub last_improvement: f64,
}

/// Exponent-space view of one channel.
struct Space<'a> {
    ch: &'a GaussianChannel,
    w: usize,
    l: usize,
    base: f64,
    floor: f64,
}

impl<'a> Space<'a> {
    fn new(ch: &'a GaussianChannel, cfg: &OptimizerConfig) -> Self {
        let base = ch.snr().max(std::f64::consts::E);
        let top = [ch.h_c, ch.h_r, ch.h_s]
            .iter()
            .map(|h| (h * h * ch.power).max(1.0).ln() / base.ln())
            .fold(1.0f64, f64::max);
        Self {
            ch,
            w: cfg.cn_splits,
            l: cfg.cf_splits,
            base,
            floor: -(top + 1.0),
        }
    }

    fn power(&self, x: f64) -> f64 {
        if x <= self.floor {
            0.0
        } else {
            self.ch.power * self.base.powf(x.min(0.0))
        }
    }

    /// Feasible allocation for exponents `x`: CN powers are made
    /// non-increasing, the transmitter is scaled into its budget, the CN
    /// powers shrink if the relay could not neutralize them, and the relay's
    /// own signals take what is left.
    fn allocation(&self, x: &[f64]) -> PowerAllocation {
        let (w, l) = (self.w, self.l);
        let p = self.ch.power;
        let mut pa = PowerAllocation::zeros(w, l);
        for i in 0..w {
            pa.cn[i] = self.power(x[i]);
            if i > 0 {
                pa.cn[i] = pa.cn[i].min(pa.cn[i - 1]);
            }
            pa.cn_future[i] = self.power(x[w + i]);
        }
        for i in 0..l {
            pa.cf[i] = self.power(x[2 * w + i]);
        }
        let k = 2 * w + l;
        pa.df = self.power(x[k]);
        pa.cm = self.power(x[k + 1]);
        pa.relay_cf = self.power(x[k + 2]);
        pa.relay_df = self.power(x[k + 3]);

        let tx = pa.tx_total();
        if tx > p {
            scale_tx(&mut pa, p / tx);
        }
        let relay_cn = relay_cn_power(self.ch, pa.cn.iter().sum());
        if relay_cn > p {
            let s = p / relay_cn;
            pa.cn.iter_mut().for_each(|v| *v *= s);
        }
        let spare = (p - pa.relay_cn(self.ch)).max(0.0);
        let own = pa.relay_cf + pa.relay_df;
        if own > spare {
            let s = spare / own;
            pa.relay_cf *= s;
            pa.relay_df *= s;
        }
        // Rounding in the scaled sums can leave a few ulps of excess.
        while pa.tx_total() > p {
            scale_tx(&mut pa, 1.0 - 4.0 * f64::EPSILON);
        }
        while pa.relay_total(self.ch) > p {
            pa.relay_cf *= 1.0 - 4.0 * f64::EPSILON;
            pa.relay_df *= 1.0 - 4.0 * f64::EPSILON;
            pa.cn
                .iter_mut()
                .for_each(|v| *v *= 1.0 - 4.0 * f64::EPSILON);
        }
        pa
    }

    fn value(&self, x: &[f64]) -> f64 {
        achievable_sum_rate(self.ch, &self.allocation(x))
            .map(|r| r.sum_rate)
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn off(&self) -> f64 {
        self.floor
    }

    /// Layered starting points for every number of active CN and CF
    /// splits, with and without a common message on top.
    fn seeds(&self, g: &GdofParams, step: f64) -> Vec<Vec<f64>> {
        let (w, l) = (self.w, self.l);
        let layer = (g.alpha - 1.0).max(step);
        let mut out = Vec::new();
        for cm_on in [false, true] {
            for lu in 0..=l {
                for wu in 0..=w {
                    let shift = if cm_on { 2.0 * layer } else { 0.0 };
                    let mut x = vec![self.off(); self.w * 2 + l + 4];
                    for i in 0..lu {
                        x[2 * w + i] = -shift - i as f64 * layer;
                    }
                    for i in 0..wu {
                        x[i] = -shift - (lu + i) as f64 * layer;
                        x[w + i] = -g.alpha - i as f64 * layer;
                    }
                    let k = 2 * w + l;
                    x[k] = -shift - lu as f64 * layer;
                    if cm_on {
                        x[k + 1] = 0.0;
                    }
                    if lu > 0 {
                        x[k + 2] = (g.alpha + lu as f64 * layer - g.beta).min(0.0);
                    }
                    x[k + 3] = 0.0;
                    out.push(x.iter().map(|v| snap(*v, step).max(self.off())).collect());
                }
            }
        }
        out
    }
}

fn scale_tx(pa: &mut PowerAllocation, s: f64) {
    for v in pa.cn.iter_mut().chain(&mut pa.cn_future).chain(&mut pa.cf) {
        *v *= s;
    }
    pa.df *= s;
    pa.cm *= s;
}

fn snap(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

struct Ascent {
    evaluations: usize,
    rounds: usize,
    last_improvement: f64,
}

impl Ascent {
    /// Greedy coordinate ascent with step halving down to `min_step`.
    fn run(&mut self, s: &Space, x: &mut [f64], cfg: &OptimizerConfig) -> f64 {
        let min_step = cfg.grid_step / 64.0;
        let mut best = s.value(x);
        self.evaluations += 1;
        let mut step = cfg.grid_step;
        for _ in 0..cfg.max_rounds {
            self.rounds += 1;
            let start = best;
            for k in 0..x.len() {
                let original = x[k];
                let mut moved = false;
                for target in [original + step, original - step, s.off()] {
                    let t = target.clamp(s.off(), 0.0);
                    if t == x[k] {
                        continue;
                    }
                    let keep = x[k];
                    x[k] = t;
                    let v = s.value(x);
                    self.evaluations += 1;
                    if v > best {
                        best = v;
                        moved = true;
                    } else {
                        x[k] = keep;
                    }
                    if moved {
                        break;
                    }
                }
            }
            let gain = best - start;
            if gain > 0.0 {
                self.last_improvement = gain;
            }
            if gain < cfg.tol {
                if step <= min_step {
                    break;
                }
                step /= 2.0;
            }
        }
        best
    }
}

/// Maximizes the achievable sum rate over power allocations with
/// `cfg.cn_splits` CN and `cfg.cf_splits` CF splits.
pub fn optimize_powers(ch: &GaussianChannel, cfg: &OptimizerConfig) -> Result<OptimizeResult> {
    cfg.validate()?;
    if !ch.is_strong_interference() {
        return Err(Error::InvalidParams(
            "the optimizer needs strong interference, h_c^2 > h_d^2".into(),
        ));
    }
    let g = ch.exponents()?;
    let space = Space::new(ch, cfg);
    let mut seeds = space.seeds(&g, cfg.grid_step);
    if let Some(seed) = &cfg.seed_exponents {
        seeds.push(seed.iter().map(|v| v.clamp(space.off(), 0.0)).collect());
    }

    let mut ascent = Ascent {
        evaluations: 0,
        rounds: 0,
        last_improvement: 0.0,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mut x in seeds {
        let v = ascent.run(&space, &mut x, cfg);
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, x));
        }
    }
    let (_, x) = best.expect("at least one seed");
    let powers = space.allocation(&x);
    let rates = achievable_sum_rate(ch, &powers)?;
    Ok(OptimizeResult {
        powers,
        rates,
        evaluations: ascent.evaluations,
        rounds: ascent.rounds,
        last_improvement: ascent.last_improvement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr: f64,
    pub sum_rate: f64,
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdofEstimate {
    /// Least-squares slope of the sum rate against `½·log₂(snr)`.
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<SnrPoint>,
}

/// Optimizes at each SNR with gains synthesized from `pattern` and fits a
/// line to the optimized sum rates.
pub fn estimate_gdof(
    pattern: &GdofParams,
    snrs: &[f64],
    cfg: &OptimizerConfig,
) -> Result<GdofEstimate> {
    if snrs.len() < 2 {
        return Err(Error::TooFewSnrPoints(snrs.len()));
    }
    if snrs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams(
            "SNR list must be strictly ascending".into(),
        ));
    }
    let mut points = Vec::with_capacity(snrs.len());
    for &snr in snrs {
        let ch = GaussianChannel::from_exponents(pattern, snr)?;
        let opt = optimize_powers(&ch, cfg)?;
        points.push(SnrPoint {
            snr,
            sum_rate: opt.rates.sum_rate,
            upper_bound: upper_bound_sumrate(&ch)?,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| 0.5 * p.snr.log2()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.sum_rate).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(GdofEstimate {
        slope,
        intercept: my - slope * mx,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(a: f64, b: f64, g: f64) -> GdofParams {
        GdofParams::new(a, b, g).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig {
            cn_splits: MAX_SPLITS + 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            seed_exponents: Some(vec![0.0; 3]),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn output_respects_budgets() {
        let ch = GaussianChannel::from_exponents(&pattern(1.2, 2.0, 3.0), 1e6).unwrap();
        let out = optimize_powers(&ch, &OptimizerConfig::default()).unwrap();
        assert!(out.powers.tx_total() <= ch.power);
        assert!(out.powers.relay_total(&ch) <= ch.power);
        assert!(out.powers.check(&ch).is_ok());
        assert!(out.rates.sum_rate > 0.0);
        assert!(out.rates.sum_rate <= upper_bound_sumrate(&ch).unwrap());
    }

    #[test]
    fn deterministic() {
        let ch = GaussianChannel::from_exponents(&pattern(1.5, 2.5, 3.5), 1e5).unwrap();
        let cfg = OptimizerConfig::default();
        assert_eq!(
            optimize_powers(&ch, &cfg).unwrap(),
            optimize_powers(&ch, &cfg).unwrap()
        );
    }

    #[test]
    fn weak_interference_is_rejected() {
        let ch = GaussianChannel::new(2.0, 1.0, 1.0, 1.0, 10.0).unwrap();
        assert!(optimize_powers(&ch, &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn relay_off_stays_below_interference_channel_bound() {
        let ch = GaussianChannel::new(1.0, 3.0, 1e-9, 1e-9, 1e4).unwrap();
        let out = optimize_powers(&ch, &OptimizerConfig::default()).unwrap();
        let c = |x: f64| 0.5 * (1.0 + x).log2();
        assert!(out.rates.sum_rate <= 2.0 * c(ch.snr()));
    }

    #[test]
    fn strong_source_link_leaves_cf_idle() {
        let ch = GaussianChannel::from_exponents(&pattern(1.2, 2.0, 6.0), 1e6).unwrap();
        let out = optimize_powers(&ch, &OptimizerConfig::default()).unwrap();
        let cf: f64 = out.rates.cf.iter().sum();
        let rest: f64 = out.rates.cn.iter().sum::<f64>() + out.rates.df;
        assert!(cf < 0.1 * rest, "cf {cf} vs cn+df {rest}");
    }

    #[test]
    fn monotone_in_snr() {
        let g = pattern(1.2, 2.0, 3.0);
        let cfg = OptimizerConfig::default();
        let rates: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&snr| {
                let ch = GaussianChannel::from_exponents(&g, snr).unwrap();
                optimize_powers(&ch, &cfg).unwrap().rates.sum_rate
            })
            .collect();
        assert!(rates.windows(2).all(|w| w[1] >= w[0]), "{rates:?}");
    }

    #[test]
    fn slope_needs_two_points() {
        let g = pattern(1.2, 2.0, 3.0);
        let cfg = OptimizerConfig::default();
        assert!(matches!(
            estimate_gdof(&g, &[1e4], &cfg),
            Err(Error::TooFewSnrPoints(1))
        ));
        assert!(estimate_gdof(&g, &[1e6, 1e4], &cfg).is_err());
    }
}
