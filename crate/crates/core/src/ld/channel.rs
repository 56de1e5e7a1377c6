use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Integer channel levels of the symmetric LD-IRC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LdParams {
    pub n_d: usize,
    pub n_c: usize,
    pub n_r: usize,
    pub n_s: usize,
}

impl LdParams {
    pub fn new(n_d: usize, n_c: usize, n_r: usize, n_s: usize) -> Result<Self> {
        let p = Self { n_d, n_c, n_r, n_s };
        if p.q() == 0 {
            return Err(Error::InvalidParams("all channel levels are zero".into()));
        }
        Ok(p)
    }

    /// Vector length, `max(n_d, n_c, n_r, n_s)`.
    pub fn q(&self) -> usize {
        self.n_d.max(self.n_c).max(self.n_r).max(self.n_s)
    }

    /// Exponents (n_c/n_d, n_r/n_d, n_s/n_d). `None` when n_d = 0.
    pub fn exponents(&self) -> Option<crate::gdof::GdofParams> {
        if self.n_d == 0 {
            return None;
        }
        let d = self.n_d as f64;
        crate::gdof::GdofParams::new(
            self.n_c as f64 / d,
            self.n_r as f64 / d,
            self.n_s as f64 / d,
        )
        .ok()
    }
}

impl fmt::Display for LdParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.n_d, self.n_c, self.n_r, self.n_s)
    }
}

/// Element of a vector space over GF(2).
pub trait Gf2: Clone + Default {
    fn add_assign(&mut self, other: &Self);
}

impl Gf2 for bool {
    fn add_assign(&mut self, other: &Self) {
        *self ^= *other;
    }
}

/// A column of `q` levels; index 0 holds level 1, the most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LevelVector<T> {
    levels: Vec<T>,
}

pub type BitVector = LevelVector<bool>;

impl<T: Gf2> LevelVector<T> {
    pub fn zeros(q: usize) -> Self {
        Self {
            levels: vec![T::default(); q],
        }
    }

    pub fn from_levels(levels: Vec<T>) -> Self {
        Self { levels }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Level `level` (1-based, 1 = top).
    pub fn level(&self, level: usize) -> &T {
        &self.levels[level - 1]
    }

    /// XOR `value` into level `level` (1-based).
    pub fn add_at(&mut self, level: usize, value: &T) {
        self.levels[level - 1].add_assign(value);
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.levels.iter()
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_len(other, self.len())?;
        let mut out = self.clone();
        for (a, b) in out.levels.iter_mut().zip(&other.levels) {
            a.add_assign(b);
        }
        Ok(out)
    }
}

impl BitVector {
    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_levels(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|b| !b)
    }
}

impl<T> Index<usize> for LevelVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.levels[i]
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.levels {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_len<T: Gf2>(x: &LevelVector<T>, q: usize) -> Result<()> {
    if x.len() != q {
        return Err(Error::LengthMismatch {
            expected: q,
            found: x.len(),
        });
    }
    Ok(())
}

/// `S^(q−n)·x`: the top `n` levels of `x` land on the bottom `n` levels.
pub fn shift_apply<T: Gf2>(x: &LevelVector<T>, n: usize, q: usize) -> Result<LevelVector<T>> {
    if n > q {
        return Err(Error::LevelOutOfRange { level: n, q });
    }
    check_len(x, q)?;
    let mut out = LevelVector::zeros(q);
    out.levels[q - n..].clone_from_slice(&x.levels[..n]);
    Ok(out)
}

/// Received column at a destination: desired, interfering and relay inputs.
pub fn rx_signal<T: Gf2>(
    xj: &LevelVector<T>,
    xl: &LevelVector<T>,
    xr: &LevelVector<T>,
    p: &LdParams,
) -> Result<LevelVector<T>> {
    let q = p.q();
    shift_apply(xj, p.n_d, q)?
        .xor(&shift_apply(xl, p.n_c, q)?)?
        .xor(&shift_apply(xr, p.n_r, q)?)
}

/// Received column at the relay.
pub fn relay_rx<T: Gf2>(
    x1: &LevelVector<T>,
    x2: &LevelVector<T>,
    p: &LdParams,
) -> Result<LevelVector<T>> {
    let q = p.q();
    check_len(x1, q)?;
    shift_apply(&x1.xor(x2)?, p.n_s, q)
}

/// Text diagram of a column, one level per line, top level first.
/// `labels[i]`, when given, annotates level `i + 1`.
pub fn render_column(x: &BitVector, labels: Option<&[String]>) -> String {
    let mut out = String::new();
    for (i, &b) in x.levels.iter().enumerate() {
        let label = labels
            .and_then(|l| l.get(i))
            .map(String::as_str)
            .unwrap_or("");
        let line = format!("{:>2} | {} {}", i + 1, u8::from(b), label);
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitVector {
        BitVector::from_levels(s.chars().map(|c| c == '1').collect())
    }

    #[test]
    fn shift_identity_and_annihilation() {
        let x = bits("101101");
        assert_eq!(shift_apply(&x, 6, 6).unwrap(), x);
        assert!(shift_apply(&x, 0, 6).unwrap().is_zero());
    }

    #[test]
    fn shift_moves_top_levels_down() {
        // (a,b,c,d,e,f) with n = 2 becomes (0,0,0,0,a,b).
        let x = bits("110000");
        assert_eq!(shift_apply(&x, 2, 6).unwrap(), bits("000011"));
        let x = bits("010000");
        assert_eq!(shift_apply(&x, 2, 6).unwrap(), bits("000001"));
    }

    #[test]
    fn shift_errors() {
        let x = bits("1010");
        assert!(matches!(
            shift_apply(&x, 5, 4),
            Err(Error::LevelOutOfRange { level: 5, q: 4 })
        ));
        assert!(matches!(
            shift_apply(&x, 2, 6),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn zero_inputs_give_zero_output() {
        let p = LdParams::new(2, 3, 6, 5).unwrap();
        let z = BitVector::zeros(6);
        assert!(rx_signal(&z, &z, &z, &p).unwrap().is_zero());
    }

    #[test]
    fn rx_signal_toy_superposition() {
        // One-hot top levels: desired arrives at level 5, interference at
        // level 4, relay at level 1.
        let p = LdParams::new(2, 3, 6, 5).unwrap();
        let top = bits("100000");
        let z = BitVector::zeros(6);
        assert_eq!(rx_signal(&top, &z, &z, &p).unwrap(), bits("000010"));
        assert_eq!(rx_signal(&z, &top, &z, &p).unwrap(), bits("000100"));
        assert_eq!(rx_signal(&z, &z, &top, &p).unwrap(), bits("100000"));
        assert_eq!(rx_signal(&top, &top, &top, &p).unwrap(), bits("100110"));
        // Interferer level 2 and relay level 5 collide: they cancel.
        assert!(rx_signal(&z, &bits("010000"), &bits("000010"), &p)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn relay_reception() {
        let p = LdParams::new(2, 3, 6, 5).unwrap();
        let x = bits("110101");
        assert!(relay_rx(&x, &x, &p).unwrap().is_zero());
        let z = BitVector::zeros(6);
        assert_eq!(
            relay_rx(&x, &z, &p).unwrap(),
            shift_apply(&x, 5, 6).unwrap()
        );
        // Future CN bits on transmit levels 4 and 5 reach the two lowest
        // relay levels.
        assert_eq!(relay_rx(&bits("000110"), &z, &p).unwrap(), bits("000011"));
    }

    #[test]
    fn render() {
        let s = render_column(&bits("10"), Some(&["cf1".to_string()]));
        assert_eq!(s, " 1 | 1 cf1\n 2 | 0\n");
    }

    fn vec_strategy(q: usize) -> impl Strategy<Value = BitVector> {
        proptest::collection::vec(any::<bool>(), q).prop_map(BitVector::from_levels)
    }

    fn params() -> impl Strategy<Value = LdParams> {
        (0usize..7, 0usize..7, 0usize..7, 0usize..7)
            .prop_filter_map("nonzero", |(a, b, c, d)| LdParams::new(a, b, c, d).ok())
    }

    fn with_vectors() -> impl Strategy<Value = (LdParams, [BitVector; 4])> {
        params().prop_flat_map(|p| {
            let q = p.q();
            (
                Just(p),
                [
                    vec_strategy(q),
                    vec_strategy(q),
                    vec_strategy(q),
                    vec_strategy(q),
                ],
            )
        })
    }

    proptest! {
        #[test]
        fn rx_is_linear((p, [x, x2, y, z]) in with_vectors()) {
            let q = p.q();
            let zero = BitVector::zeros(q);
            let lhs = rx_signal(&x.xor(&x2).unwrap(), &y, &z, &p).unwrap();
            let rhs = rx_signal(&x, &y, &z, &p)
                .unwrap()
                .xor(&rx_signal(&x2, &zero, &zero, &p).unwrap())
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn double_shift_composes((p, [x, ..]) in with_vectors(), n in 0usize..7) {
            let q = p.q();
            let n = n.min(q);
            let twice = shift_apply(&shift_apply(&x, n, q).unwrap(), n, q).unwrap();
            let once = shift_apply(&x, (2 * n).saturating_sub(q), q).unwrap();
            prop_assert_eq!(twice, once);
        }

        #[test]
        fn aligned_relay_neutralizes((p, [x, ..]) in with_vectors()) {
            let p = LdParams { n_r: p.n_c, ..p };
            let q = p.q();
            let x = BitVector::from_levels(x.iter().copied().chain(std::iter::repeat(false)).take(q).collect());
            let zero = BitVector::zeros(q);
            prop_assert!(rx_signal(&zero, &x, &x, &p).unwrap().is_zero());
        }
    }
}
