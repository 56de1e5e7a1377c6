//! Closed-form GDoF expressions for the IRC with strong interference.
//!
//! All quantities are normalized by ½·log(P·h_d²), so the coordinate system
//! is the exponent triple (α, β, γ): cross link, relay→destination and
//! source→relay strength relative to the direct link.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance on 2α − γ for the [`Regime::Boundary`] case.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// `C(x) = ½·log₂(1 + x)`.
pub fn c_of(x: f64) -> Result<f64> {
    if !(1.0 + x > 0.0) {
        return Err(Error::Domain(x));
    }
    Ok(0.5 * (1.0 + x).log2())
}

/// `C⁺(x) = max(0, C(x))`, defined for every `x > −1`.
pub fn c_plus(x: f64) -> Result<f64> {
    c_of(x).map(|c| c.max(0.0))
}

/// Exponent triple (α, β, γ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdofParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GdofParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// α > 1, i.e. h_c² > h_d².
    pub fn is_strong_interference(&self) -> bool {
        self.alpha > 1.0
    }

    /// 1 < α < γ, where the closed-form GDoF is known.
    pub fn in_theorem_scope(&self) -> bool {
        1.0 < self.alpha && self.alpha < self.gamma
    }
}

/// The individual terms appearing in the upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundTerm {
    /// 2·max(1, β)
    TwiceMaxOneBeta,
    /// 2·max(1, γ)
    TwiceMaxOneGamma,
    /// max(α, β) + (γ − α)⁺
    MaxAlphaBetaPlusExcess,
    /// γ + α
    GammaPlusAlpha,
    /// α + β, the genie-aided bound
    AlphaPlusBeta,
}

impl BoundTerm {
    pub fn label(self) -> &'static str {
        match self {
            BoundTerm::TwiceMaxOneBeta => "2max(1,b)",
            BoundTerm::TwiceMaxOneGamma => "2max(1,g)",
            BoundTerm::MaxAlphaBetaPlusExcess => "max(a,b)+g-a",
            BoundTerm::GammaPlusAlpha => "g+a",
            BoundTerm::AlphaPlusBeta => "a+b",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [
            BoundTerm::TwiceMaxOneBeta,
            BoundTerm::TwiceMaxOneGamma,
            BoundTerm::MaxAlphaBetaPlusExcess,
            BoundTerm::GammaPlusAlpha,
            BoundTerm::AlphaPlusBeta,
        ]
        .into_iter()
        .find(|t| t.label() == s)
    }

    pub fn eval(self, p: &GdofParams) -> f64 {
        let GdofParams { alpha, beta, gamma } = *p;
        match self {
            BoundTerm::TwiceMaxOneBeta => 2.0 * beta.max(1.0),
            BoundTerm::TwiceMaxOneGamma => 2.0 * gamma.max(1.0),
            BoundTerm::MaxAlphaBetaPlusExcess => alpha.max(beta) + (gamma - alpha).max(0.0),
            BoundTerm::GammaPlusAlpha => gamma + alpha,
            BoundTerm::AlphaPlusBeta => alpha + beta,
        }
    }
}

impl fmt::Display for BoundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

const KNOWN_TERMS: [BoundTerm; 4] = [
    BoundTerm::TwiceMaxOneBeta,
    BoundTerm::TwiceMaxOneGamma,
    BoundTerm::MaxAlphaBetaPlusExcess,
    BoundTerm::GammaPlusAlpha,
];

const GDOF_TERMS: [BoundTerm; 4] = [
    BoundTerm::TwiceMaxOneBeta,
    BoundTerm::MaxAlphaBetaPlusExcess,
    BoundTerm::GammaPlusAlpha,
    BoundTerm::AlphaPlusBeta,
];

/// Minimum over `terms`; the first minimizer in list order wins ties.
fn min_of(terms: &[BoundTerm], p: &GdofParams) -> (f64, BoundTerm) {
    let mut best = (terms[0].eval(p), terms[0]);
    for &t in &terms[1..] {
        let v = t.eval(p);
        if v < best.0 {
            best = (v, t);
        }
    }
    best
}

/// The genie-aided sum bound: d ≤ α + β.
pub fn bound_new(p: &GdofParams) -> f64 {
    p.alpha + p.beta
}

/// The four previously known bounds and the term attaining their minimum.
pub fn bound_known(p: &GdofParams) -> (f64, BoundTerm) {
    min_of(&KNOWN_TERMS, p)
}

/// Four-term minimum of the GDoF characterization with its binding term,
/// evaluated regardless of scope. Outside 1 < α < γ this is only a bound
/// expression, not the GDoF.
pub fn gdof_expression(p: &GdofParams) -> (f64, BoundTerm) {
    min_of(&GDOF_TERMS, p)
}

/// GDoF of the IRC for 1 < α < γ.
pub fn gdof_irc(p: &GdofParams) -> Result<f64> {
    if !p.in_theorem_scope() {
        return Err(Error::OutOfScope {
            alpha: p.alpha,
            gamma: p.gamma,
        });
    }
    Ok(gdof_expression(p).0)
}

/// GDoF of the plain interference channel with strong interference.
pub fn gdof_ic(p: &GdofParams) -> f64 {
    p.alpha.min(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// 2α < γ: the relay can learn all future CN signals.
    FutureRich,
    /// 2α = γ, the peak of the α-curve.
    Boundary,
    /// 2α > γ: future signalling to the relay is the bottleneck.
    FutureLimited,
    OutOfTheoremScope,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::FutureRich => "future-rich",
            Regime::Boundary => "boundary",
            Regime::FutureLimited => "future-limited",
            Regime::OutOfTheoremScope => "out-of-scope",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [
            Regime::FutureRich,
            Regime::Boundary,
            Regime::FutureLimited,
            Regime::OutOfTheoremScope,
        ]
        .into_iter()
        .find(|r| r.label() == s)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify_regime(p: &GdofParams) -> Regime {
    if !p.in_theorem_scope() {
        return Regime::OutOfTheoremScope;
    }
    let gap = 2.0 * p.alpha - p.gamma;
    if gap.abs() <= BOUNDARY_TOL {
        Regime::Boundary
    } else if gap < 0.0 {
        Regime::FutureRich
    } else {
        Regime::FutureLimited
    }
}

/// One evaluated point of an α-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdofPoint {
    pub params: GdofParams,
    pub bound_new: f64,
    pub bound_known: f64,
    pub gdof_irc: Option<f64>,
    pub gdof_ic: f64,
    pub binding_term: BoundTerm,
    pub regime: Regime,
}

impl GdofPoint {
    pub fn evaluate(params: GdofParams) -> Self {
        let (expr, binding_term) = gdof_expression(&params);
        Self {
            params,
            bound_new: bound_new(&params),
            bound_known: bound_known(&params).0,
            gdof_irc: params.in_theorem_scope().then_some(expr),
            gdof_ic: gdof_ic(&params),
            binding_term,
            regime: classify_regime(&params),
        }
    }

    /// min(bound_new, bound_known), the best upper bound at this point.
    pub fn min_bound(&self) -> f64 {
        self.bound_new.min(self.bound_known)
    }
}

/// Inclusive α-grid `start, start + step, …` up to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl AlphaGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Self {
        Self { start, end, step }
    }

    /// Grid values computed as `start + i·step` so that rounding does not
    /// accumulate; the end point is included up to a relative slack.
    pub fn values(&self) -> Result<Vec<f64>> {
        let Self { start, end, step } = *self;
        if !(step > 0.0) || !start.is_finite() || !end.is_finite() || start > end {
            return Err(Error::EmptyRange { start, end, step });
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| start + i as f64 * step).collect())
    }
}

/// Evaluates every α on the grid for fixed β and γ.
pub fn sweep(grid: AlphaGrid, beta: f64, gamma: f64) -> Result<Vec<GdofPoint>> {
    // Validate β, γ up front.
    GdofParams::new(1.0, beta, gamma)?;
    if grid.start < 0.0 || grid.end > gamma + 1.0 {
        return Err(Error::InvalidParams(format!(
            "alpha range [{}, {}] must lie within [0, gamma + 1 = {}]",
            grid.start,
            grid.end,
            gamma + 1.0
        )));
    }
    grid.values()?
        .into_iter()
        .map(|alpha| GdofParams::new(alpha, beta, gamma).map(GdofPoint::evaluate))
        .collect()
}
