//! Block-Markov pipeline over the LD channel.
//!
//! Every transmitted level is tracked twice: as a concrete bit and as a
//! GF(2) linear form over the message bits. Nodes decode by elimination on
//! (form, observed bit) pairs, so decodability is an exact rank question
//! and the same code path serves validation (forms only) and simulation.
//!
//! Transmission blocks run from 0 to B + 1. Messages exist for blocks
//! 1..=B. Block 0 carries only the future CN bits of block 1, block B
//! carries no future CN bits, and in block B + 1 only the relay speaks,
//! flushing the DF bits and CF sums of block B.

use super::allocation::{Allocation, ValidationFailure};
use super::channel::{relay_rx, rx_signal, BitVector, Gf2, LdParams, LevelVector};
use super::gf2::{Gf2System, LinearForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Cat {
    Cf,
    Cn,
    Df,
}

impl Cat {
    pub(crate) const ALL: [Cat; 3] = [Cat::Cf, Cat::Cn, Cat::Df];

    fn tag(self) -> &'static str {
        match self {
            Cat::Cf => "cf",
            Cat::Cn => "cn",
            Cat::Df => "df",
        }
    }
}

/// What the relay puts on one of its levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RelaySlot {
    Df { user: usize, index: usize },
    CfSum(usize),
    CnSum(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Scheme {
    pub p: LdParams,
    pub a: Allocation,
    pub blocks: usize,
}

impl Scheme {
    pub fn new(p: LdParams, a: Allocation, blocks: usize) -> Self {
        Self { p, a, blocks }
    }

    pub fn q(&self) -> usize {
        self.p.q()
    }

    fn count(&self, cat: Cat) -> usize {
        match cat {
            Cat::Cf => self.a.cf_count(),
            Cat::Cn => self.a.cn_count(),
            Cat::Df => self.a.df_count(),
        }
    }

    fn offset(&self, cat: Cat) -> usize {
        match cat {
            Cat::Cf => 0,
            Cat::Cn => self.a.cf_count(),
            Cat::Df => self.a.cf_count() + self.a.cn_count(),
        }
    }

    pub fn per_user(&self) -> usize {
        self.a.bits_per_user()
    }

    pub fn num_vars(&self) -> usize {
        self.blocks * 2 * self.per_user()
    }

    /// Variable index of a message bit; `block` in 1..=B.
    pub fn var(&self, block: usize, user: usize, cat: Cat, k: usize) -> usize {
        ((block - 1) * 2 + user) * self.per_user() + self.offset(cat) + k
    }

    fn var_label(&self, v: usize) -> String {
        let per_user = self.per_user();
        let (slot, within) = (v / per_user, v % per_user);
        let (block, user) = (slot / 2 + 1, slot % 2);
        let cat = Cat::ALL
            .into_iter()
            .rev()
            .find(|&c| within >= self.offset(c) && self.count(c) > 0)
            .unwrap_or(Cat::Cf);
        format!(
            "{}{}.{}({})",
            cat.tag(),
            within - self.offset(cat) + 1,
            user + 1,
            block
        )
    }

    pub fn form_label(&self, f: &LinearForm) -> String {
        if f.is_zero() {
            return String::new();
        }
        f.ones()
            .map(|v| self.var_label(v))
            .collect::<Vec<_>>()
            .join("+")
    }

    fn message(&self, block: usize, user: usize, cat: Cat, k: usize) -> Option<LinearForm> {
        (1..=self.blocks)
            .contains(&block)
            .then(|| LinearForm::var(self.var(block, user, cat, k)))
    }

    fn sum(&self, block: usize, cat: Cat, k: usize) -> Option<LinearForm> {
        let mut f = self.message(block, 0, cat, k)?;
        f.add_assign(&self.message(block, 1, cat, k)?);
        Some(f)
    }

    /// Symbolic transmit column of user `u` in block `t`.
    pub fn tx_forms(&self, t: usize, u: usize) -> LevelVector<LinearForm> {
        let layout = &self.a.tx[u];
        let mut x = LevelVector::zeros(self.q());
        let lists = [
            (&layout.cf, Cat::Cf, t),
            (&layout.cn_current, Cat::Cn, t),
            (&layout.df, Cat::Df, t),
            (&layout.cn_future, Cat::Cn, t + 1),
        ];
        for (levels, cat, block) in lists {
            for (k, &level) in levels.iter().enumerate() {
                if let Some(f) = self.message(block, u, cat, k) {
                    x.add_at(level, &f);
                }
            }
        }
        x
    }

    /// Relay levels active in block `t` and the forms they should carry.
    pub fn relay_slots(&self, t: usize) -> Vec<(usize, RelaySlot, LinearForm)> {
        let r = &self.a.relay;
        let mut out = Vec::new();
        let prev = t.checked_sub(1);
        for (user, levels) in r.df.iter().enumerate() {
            for (index, &level) in levels.iter().enumerate() {
                if let Some(f) = prev.and_then(|b| self.message(b, user, Cat::Df, index)) {
                    out.push((level, RelaySlot::Df { user, index }, f));
                }
            }
        }
        for (k, &level) in r.cf_sum.iter().enumerate() {
            if let Some(f) = prev.and_then(|b| self.sum(b, Cat::Cf, k)) {
                out.push((level, RelaySlot::CfSum(k), f));
            }
        }
        for (k, &level) in r.cn_sum.iter().enumerate() {
            if let Some(f) = self.sum(t, Cat::Cn, k) {
                out.push((level, RelaySlot::CnSum(k), f));
            }
        }
        out
    }

    /// Symbolic relay column in block `t`, assuming correct relay decoding.
    pub fn relay_forms(&self, t: usize) -> LevelVector<LinearForm> {
        let mut x = LevelVector::zeros(self.q());
        for (level, _, f) in self.relay_slots(t) {
            x.add_at(level, &f);
        }
        x
    }

    /// Message bits of block `t` intended for user `j`.
    pub fn desired(&self, t: usize, j: usize) -> Vec<(Cat, usize, usize)> {
        Cat::ALL
            .into_iter()
            .flat_map(|cat| (0..self.count(cat)).map(move |k| (cat, k)))
            .map(|(cat, k)| (cat, k, self.var(t, j, cat, k)))
            .collect()
    }

    pub fn last_block(&self) -> usize {
        self.blocks + 1
    }
}

/// Evaluates a symbolic column on concrete message values.
pub(crate) fn eval_column(x: &LevelVector<LinearForm>, values: &[bool]) -> BitVector {
    BitVector::from_levels(x.iter().map(|f| f.eval(values)).collect())
}

/// The causal relay: it decodes from what it has received so far and
/// re-emits in the next block.
#[derive(Debug, Clone)]
pub struct RelayNode {
    scheme: Scheme,
    system: Gf2System,
    /// Decoded slot values per transmit block; `None` when undecodable.
    decoded: Vec<Vec<(usize, Option<bool>)>>,
}

/// A relay slot of block `block` that could not be decoded in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RelayMiss {
    pub block: usize,
    pub slot: RelaySlot,
}

impl RelayNode {
    pub(crate) fn from_scheme(scheme: Scheme) -> Self {
        let slots = scheme.last_block() + 1;
        Self {
            scheme,
            system: Gf2System::new(),
            decoded: vec![Vec::new(); slots],
        }
    }

    /// Fresh relay for `blocks` message blocks.
    pub fn new(p: LdParams, a: Allocation, blocks: usize) -> Self {
        Self::from_scheme(Scheme::new(p, a, blocks))
    }

    /// Ingests the reception of block `t` and decodes everything due in
    /// block `t + 1`. Returns the slots it could not decode.
    pub(crate) fn observe_block(&mut self, t: usize, y: &BitVector) -> Vec<RelayMiss> {
        let s = &self.scheme;
        let forms = relay_rx(&s.tx_forms(t, 0), &s.tx_forms(t, 1), &s.p)
            .expect("layout validated against q");
        for (f, &bit) in forms.iter().zip(y.iter()) {
            self.system.insert(f, bit);
        }
        let next = t + 1;
        let mut misses = Vec::new();
        if next > s.last_block() {
            return misses;
        }
        let mut out = Vec::new();
        for (level, slot, f) in s.relay_slots(next) {
            let v = self.system.solve(&f);
            if v.is_none() {
                misses.push(RelayMiss { block: next, slot });
            }
            out.push((level, v));
        }
        self.decoded[next] = out;
        misses
    }

    /// Ingests the reception of block `t`; returns how many slots of block
    /// `t + 1` it failed to decode.
    pub fn observe(&mut self, t: usize, y: &BitVector) -> usize {
        self.observe_block(t, y).len()
    }

    /// Column sent in block `t`, built only from earlier observations.
    /// Undecodable slots are sent as 0.
    pub fn transmit(&self, t: usize) -> BitVector {
        let mut x = BitVector::zeros(self.scheme.q());
        if let Some(slots) = self.decoded.get(t) {
            for &(level, v) in slots {
                x.add_at(level, &v.unwrap_or(false));
            }
        }
        x
    }
}

/// Whether the relay can decode everything it must forward. Depends only
/// on the transmit layouts and the category sizes, not on relay levels.
pub(crate) fn relay_can_decode(scheme: &Scheme) -> bool {
    let mut relay = RelayNode::from_scheme(scheme.clone());
    let silent = BitVector::zeros(scheme.q());
    (0..=scheme.last_block()).all(|t| relay.observe_block(t, &silent).is_empty())
}

/// Whether both destinations recover every desired bit by backward
/// decoding, assuming the relay forwards correctly.
pub(crate) fn receivers_can_decode(scheme: &Scheme) -> bool {
    let relay: Vec<_> = (0..=scheme.last_block())
        .map(|t| scheme.relay_forms(t))
        .collect();
    (0..2).all(|j| {
        let mut system = Gf2System::new();
        (1..=scheme.last_block()).rev().all(|t| {
            let forms = rx_signal(
                &scheme.tx_forms(t, j),
                &scheme.tx_forms(t, 1 - j),
                &relay[t],
                &scheme.p,
            )
            .expect("layout validated against q");
            for f in forms.iter() {
                system.insert(f, false);
            }
            t > scheme.blocks
                || scheme
                    .desired(t, j)
                    .into_iter()
                    .all(|(_, _, var)| system.spans(&LinearForm::var(var)))
        })
    })
}

/// Per-block record of what every node sent and received.
#[derive(Debug, Clone)]
pub struct BlockTrace {
    pub block: usize,
    pub tx: [BitVector; 2],
    pub relay_rx: BitVector,
    pub relay_tx: BitVector,
    pub rx: [BitVector; 2],
    pub tx_labels: [Vec<String>; 2],
    pub relay_rx_labels: Vec<String>,
    pub relay_tx_labels: Vec<String>,
    pub rx_labels: [Vec<String>; 2],
}

pub(crate) type Decoded = (usize, Cat, usize, Option<bool>);

/// Outcome of one run of the pipeline.
#[derive(Debug, Clone)]
pub(crate) struct SchemeRun {
    pub first_failure: Option<ValidationFailure>,
    pub relay_misses: usize,
    /// Per user: (block, category, variable, decoded value).
    pub decoded: [Vec<Decoded>; 2],
    pub trace: Vec<BlockTrace>,
}

impl SchemeRun {
    /// Decodability only; message bits are all zero.
    pub fn symbolic(scheme: &Scheme) -> Self {
        let zeros = vec![false; scheme.num_vars()];
        Self::execute(scheme, &zeros, false)
    }

    pub fn execute(scheme: &Scheme, values: &[bool], keep_trace: bool) -> Self {
        let p = &scheme.p;
        let last = scheme.last_block();
        let mut first_failure = None;
        let mut relay = RelayNode::from_scheme(scheme.clone());
        let mut relay_misses = 0;
        let labels = |x: &LevelVector<LinearForm>| -> Vec<String> {
            x.iter().map(|f| scheme.form_label(f)).collect()
        };

        let mut rx_bits: Vec<[BitVector; 2]> = Vec::with_capacity(last + 1);
        let mut trace = Vec::new();
        for t in 0..=last {
            let tx_forms = [scheme.tx_forms(t, 0), scheme.tx_forms(t, 1)];
            let tx = [
                eval_column(&tx_forms[0], values),
                eval_column(&tx_forms[1], values),
            ];
            let xr = relay.transmit(t);
            let yr = relay_rx(&tx[0], &tx[1], p).expect("layout validated against q");
            let y = [
                rx_signal(&tx[0], &tx[1], &xr, p).expect("layout validated against q"),
                rx_signal(&tx[1], &tx[0], &xr, p).expect("layout validated against q"),
            ];
            if keep_trace {
                let relay_forms = scheme.relay_forms(t);
                let yr_forms = relay_rx(&tx_forms[0], &tx_forms[1], p).unwrap();
                let rx_forms =
                    |j: usize| rx_signal(&tx_forms[j], &tx_forms[1 - j], &relay_forms, p).unwrap();
                trace.push(BlockTrace {
                    block: t,
                    tx: tx.clone(),
                    relay_rx: yr.clone(),
                    relay_tx: xr.clone(),
                    rx: y.clone(),
                    tx_labels: [labels(&tx_forms[0]), labels(&tx_forms[1])],
                    relay_rx_labels: labels(&yr_forms),
                    relay_tx_labels: labels(&relay_forms),
                    rx_labels: [labels(&rx_forms(0)), labels(&rx_forms(1))],
                });
            }
            let misses = relay.observe_block(t, &yr);
            relay_misses += misses.len();
            if first_failure.is_none() {
                first_failure = misses.first().map(relay_failure);
            }
            rx_bits.push(y);
        }

        let mut decoded: [Vec<_>; 2] = [Vec::new(), Vec::new()];
        for j in 0..2 {
            let mut system = Gf2System::new();
            for t in (1..=last).rev() {
                let relay_forms = scheme.relay_forms(t);
                let forms = rx_signal(
                    &scheme.tx_forms(t, j),
                    &scheme.tx_forms(t, 1 - j),
                    &relay_forms,
                    p,
                )
                .expect("layout validated against q");
                for (f, &bit) in forms.iter().zip(rx_bits[t][j].iter()) {
                    system.insert(f, bit);
                }
                if t > scheme.blocks {
                    continue;
                }
                for (cat, k, var) in scheme.desired(t, j) {
                    let v = system.solve(&LinearForm::var(var));
                    if v.is_none() && first_failure.is_none() {
                        first_failure = Some(ValidationFailure::BackwardDecoding {
                            user: j,
                            block: t,
                            what: format!("{}{}", cat.tag(), k + 1),
                        });
                    }
                    decoded[j].push((t, cat, var, v));
                }
            }
        }

        Self {
            first_failure,
            relay_misses,
            decoded,
            trace,
        }
    }
}

fn relay_failure(m: &RelayMiss) -> ValidationFailure {
    // The slot was due in `m.block`; decoding happened one block earlier.
    let block = m.block - 1;
    match m.slot {
        RelaySlot::CnSum(split) => ValidationFailure::Causality { block, split },
        RelaySlot::CfSum(k) => ValidationFailure::RelayDecoding {
            block,
            what: format!("CF sum {}", k + 1),
        },
        RelaySlot::Df { user, index } => ValidationFailure::RelayDecoding {
            block,
            what: format!("DF bit {} of user {}", index + 1, user + 1),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ld::toy_allocation;

    fn toy() -> Scheme {
        Scheme::new(LdParams::new(2, 3, 6, 5).unwrap(), toy_allocation(), 3)
    }

    #[test]
    fn variable_layout() {
        let s = toy();
        assert_eq!(s.per_user(), 4);
        assert_eq!(s.num_vars(), 24);
        assert_eq!(s.var(1, 0, Cat::Cf, 0), 0);
        assert_eq!(s.var(1, 1, Cat::Cn, 1), 6);
        assert_eq!(s.var(3, 1, Cat::Df, 0), 23);
        assert_eq!(s.var_label(6), "cn2.2(1)");
        assert_eq!(s.var_label(23), "df1.2(3)");
    }

    #[test]
    fn boundary_blocks() {
        let s = toy();
        // Block 0: only the future CN bits of block 1.
        let x = s.tx_forms(0, 0);
        let nonzero: Vec<usize> = (1..=6).filter(|&l| !x.level(l).is_zero()).collect();
        assert_eq!(nonzero, vec![4, 5]);
        assert!(s.relay_slots(0).is_empty());
        // Block B: no future bits; block B + 1: relay flush only.
        let x = s.tx_forms(3, 0);
        assert!(x.level(4).is_zero() && x.level(5).is_zero());
        assert!(s.tx_forms(4, 0).iter().all(LinearForm::is_zero));
        let flush: Vec<RelaySlot> = s.relay_slots(4).into_iter().map(|(_, k, _)| k).collect();
        assert_eq!(flush.len(), 3);
        assert!(!flush.iter().any(|k| matches!(k, RelaySlot::CnSum(_))));
    }

    #[test]
    fn toy_steady_state_labels() {
        let s = toy();
        let x = s.tx_forms(2, 0);
        let labels: Vec<String> = x.iter().map(|f| s.form_label(f)).collect();
        assert_eq!(
            labels,
            [
                "cf1.1(2)",
                "cn1.1(2)+df1.1(2)",
                "cn2.1(2)",
                "cn1.1(3)",
                "cn2.1(3)",
                ""
            ]
        );
    }

    #[test]
    fn symbolic_toy_run_is_clean() {
        let run = SchemeRun::symbolic(&toy());
        assert_eq!(run.first_failure, None);
        assert_eq!(run.relay_misses, 0);
        assert_eq!(run.decoded[0].len(), 12);
        assert!(run.decoded.iter().flatten().all(|d| d.3.is_some()));
    }
}
