use std::fmt;

use serde::{Deserialize, Serialize};

use super::channel::LdParams;
use super::engine::{Scheme, SchemeRun};
use crate::{Error, Result};

/// Level placement of one transmitter's signals. All levels are 1-based
/// (1 = most significant); entry `k` of each list is split `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TxLayout {
    pub cf: Vec<usize>,
    pub cn_current: Vec<usize>,
    pub df: Vec<usize>,
    /// Future CN bits, carrying the CN message of block b + 1.
    pub cn_future: Vec<usize>,
}

/// Level placement of what the relay forwards.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RelayLayout {
    /// `df[u][k]`: level of user `u`'s k-th DF bit from the previous block.
    pub df: [Vec<usize>; 2],
    /// XOR of both users' CF bits of split `k`, from the previous block.
    pub cf_sum: Vec<usize>,
    /// XOR of both users' current CN bits of split `k`.
    pub cn_sum: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Allocation {
    pub tx: [TxLayout; 2],
    pub relay: RelayLayout,
}

impl Allocation {
    pub fn cf_count(&self) -> usize {
        self.tx[0].cf.len()
    }

    pub fn cn_count(&self) -> usize {
        self.tx[0].cn_current.len()
    }

    pub fn df_count(&self) -> usize {
        self.tx[0].df.len()
    }

    /// Information bits delivered to one user per steady-state block.
    pub fn bits_per_user(&self) -> usize {
        self.cf_count() + self.cn_count() + self.df_count()
    }

    /// Sum over both users.
    pub fn bits_per_block(&self) -> usize {
        2 * self.bits_per_user()
    }
}

/// The layout of the n = (2, 3, 6, 5) example: one CF bit on the top level,
/// two current CN bits below it, two future CN bits on the levels the relay
/// receives lowest, and one DF bit per user superposed on a CN level.
/// User 1 puts its DF bit on the first CN level and user 2 on the second,
/// so the relay sees them on different levels once it strips the CN sums.
pub fn toy_allocation() -> Allocation {
    let tx = |df_level| TxLayout {
        cf: vec![1],
        cn_current: vec![2, 3],
        df: vec![df_level],
        cn_future: vec![4, 5],
    };
    Allocation {
        tx: [tx(2), tx(3)],
        relay: RelayLayout {
            df: [vec![1], vec![2]],
            cf_sum: vec![3],
            cn_sum: vec![5, 6],
        },
    }
}

/// Sum of delivered bits per block that the GDoF characterization allows:
/// n_d times the four-term minimum, which is an integer for integer levels.
fn target_bits(p: &LdParams) -> usize {
    let (n_d, n_c, n_r, n_s) = (p.n_d, p.n_c, p.n_r, p.n_s);
    [
        2 * n_d.max(n_r),
        n_c.max(n_r) + n_s - n_c,
        n_s + n_c,
        n_c + n_r,
    ]
    .into_iter()
    .min()
    .unwrap()
}

/// Builds a layout from the level-counting of the CN/DF/CF scheme.
///
/// With 2n_c ≤ n_s every interfering level is neutralized (all n_c top
/// levels carry CN) and DF bits ride on the CN levels or on free levels
/// above the future CN block. With 2n_c > n_s only n_s − n_c CN bits fit
/// their future copies between n_c and n_s; the vacated top levels carry
/// CF. The relay forwards DF bits and CF sums on its top levels and CN sums
/// on the levels aligned with the interferer's CN levels.
///
/// Covered: n_d ≥ 1, n_d < n_c < n_s, n_c < n_r, an even target of
/// n_d·gdof bits per block, and a layout that reaches the target and
/// validates. Anything else is an [`Error::UnsupportedRegime`].
pub fn construct_allocation(p: &LdParams) -> Result<Allocation> {
    let (n_d, n_c, n_r, n_s) = (p.n_d, p.n_c, p.n_r, p.n_s);
    if !(n_d >= 1 && n_d < n_c && n_c < n_s) {
        return Err(Error::UnsupportedRegime(format!(
            "{p}: needs n_d < n_c < n_s"
        )));
    }
    if n_r <= n_c {
        return Err(Error::UnsupportedRegime(format!(
            "{p}: needs n_r > n_c so the relay can forward DF bits above the neutralized levels"
        )));
    }
    let target = target_bits(p);
    if target % 2 == 1 {
        return Err(Error::UnsupportedRegime(format!(
            "{p}: {target} bits per block cannot be split evenly between the users; \
             a symbol extension over several blocks would be needed"
        )));
    }

    let (cf, cn, df_slots) = if 2 * n_c <= n_s {
        (0, n_c, (n_r - n_c).min(n_s - n_c))
    } else {
        let cn = n_s - n_c;
        let cf = 2 * n_c - n_s;
        (cf, cn, (n_s - n_c).min((n_r - n_c).saturating_sub(cf)))
    };
    let df = df_slots / 2;
    let reached = 2 * (cf + cn + df);
    if reached != target {
        return Err(Error::UnsupportedRegime(format!(
            "{p}: layout reaches {reached} of the {target} bits per block"
        )));
    }

    let cf_levels: Vec<usize> = (1..=cf).collect();
    let cn_levels: Vec<usize> = (cf + 1..=cf + cn).collect();
    let future_levels: Vec<usize> = (n_s - cn + 1..=n_s).collect();
    let free = (1..=n_s)
        .filter(|l| !cf_levels.contains(l) && !cn_levels.contains(l) && !future_levels.contains(l));
    let mut df_tx_slots = cn_levels.iter().copied().chain(free);

    let mut tx = [TxLayout::default(), TxLayout::default()];
    let mut relay = RelayLayout::default();
    let mut relay_level = 1;
    for _ in 0..df {
        for (u, layout) in tx.iter_mut().enumerate() {
            let level = df_tx_slots.next().expect("slot count checked above");
            layout.df.push(level);
            relay.df[u].push(relay_level);
            relay_level += 1;
        }
    }
    relay.cf_sum = (relay_level..relay_level + cf).collect();
    relay.cn_sum = cn_levels.iter().map(|c| c + n_r - n_c).collect();
    for layout in &mut tx {
        layout.cf = cf_levels.clone();
        layout.cn_current = cn_levels.clone();
        layout.cn_future = future_levels.clone();
    }

    let a = Allocation { tx, relay };
    if let Some(f) = validate_allocation(&a, p).failure {
        return Err(Error::UnsupportedRegime(format!(
            "{p}: constructed layout fails validation: {f}"
        )));
    }
    Ok(a)
}

/// Which side of the link a structural violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Tx(usize),
    Relay,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Tx(u) => write!(f, "TX{}", u + 1),
            Node::Relay => f.write_str("relay"),
        }
    }
}

/// First condition an allocation violates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationFailure {
    /// Category sizes differ between users or between related lists.
    Shape(String),
    LevelOutOfRange {
        node: Node,
        level: usize,
    },
    /// Two signals of one node share a level. A transmit level may hold a
    /// current CN bit superposed with one other bit, nothing more.
    Collision {
        node: Node,
        level: usize,
    },
    /// CN split `split` is not received on the same level as the relay's
    /// CN sum at the destinations.
    Misaligned {
        split: usize,
    },
    /// The relay cannot learn the sum of the future CN bits of `split`
    /// while they are still future.
    Causality {
        block: usize,
        split: usize,
    },
    /// The relay cannot decode what it must forward.
    RelayDecoding {
        block: usize,
        what: String,
    },
    /// A destination cannot recover a desired bit by backward decoding.
    BackwardDecoding {
        user: usize,
        block: usize,
        what: String,
    },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape(s) => write!(f, "shape: {s}"),
            Self::LevelOutOfRange { node, level } => {
                write!(f, "{node}: level {level} out of range")
            }
            Self::Collision { node, level } => write!(f, "{node}: collision on level {level}"),
            Self::Misaligned { split } => {
                write!(
                    f,
                    "CN split {} not aligned with the relay CN sum",
                    split + 1
                )
            }
            Self::Causality { block, split } => write!(
                f,
                "relay cannot receive future CN sum of split {} in block {block}",
                split + 1
            ),
            Self::RelayDecoding { block, what } => {
                write!(f, "relay cannot decode {what} in block {block}")
            }
            Self::BackwardDecoding { user, block, what } => {
                write!(f, "RX{} cannot decode {what} of block {block}", user + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub failure: Option<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Blocks used for the symbolic decodability check: enough for an
/// initialization block, two full steady-state blocks and the flush block.
const VALIDATION_BLOCKS: usize = 3;

pub fn validate_allocation(a: &Allocation, p: &LdParams) -> ValidationReport {
    let failure = check_structure(a, p).err().or_else(|| {
        let scheme = Scheme::new(*p, a.clone(), VALIDATION_BLOCKS);
        SchemeRun::symbolic(&scheme).first_failure
    });
    ValidationReport { failure }
}

pub(crate) fn check_structure(
    a: &Allocation,
    p: &LdParams,
) -> std::result::Result<(), ValidationFailure> {
    let q = p.q();
    let [t1, t2] = &a.tx;
    let shape = |what: &str| Err(ValidationFailure::Shape(what.to_string()));
    if t1.cf.len() != t2.cf.len() || t1.cn_current.len() != t2.cn_current.len() {
        return shape("both users must use the same CF and CN split counts");
    }
    if t1.df.len() != t2.df.len() {
        return shape("both users must send the same number of DF bits");
    }
    for t in &a.tx {
        if t.cn_future.len() != t.cn_current.len() {
            return shape("every CN split needs one current and one future level");
        }
    }
    if a.relay.cf_sum.len() != t1.cf.len()
        || a.relay.cn_sum.len() != t1.cn_current.len()
        || a.relay.df[0].len() != t1.df.len()
        || a.relay.df[1].len() != t2.df.len()
    {
        return shape("relay layout must forward every CF sum, CN sum and DF bit exactly once");
    }

    for (u, t) in a.tx.iter().enumerate() {
        let node = Node::Tx(u);
        // (current CN count, other count) per level
        let mut occupancy = vec![(0usize, 0usize); q + 1];
        let others = t.cf.iter().chain(&t.df).chain(&t.cn_future);
        for &level in t.cn_current.iter().chain(others.clone()) {
            if level == 0 || level > q {
                return Err(ValidationFailure::LevelOutOfRange { node, level });
            }
        }
        for &level in &t.cn_current {
            occupancy[level].0 += 1;
        }
        for &level in others {
            occupancy[level].1 += 1;
        }
        if let Some(level) = (1..=q).find(|&l| occupancy[l].0 > 1 || occupancy[l].1 > 1) {
            return Err(ValidationFailure::Collision { node, level });
        }
    }

    let r = &a.relay;
    let mut used = vec![false; q + 1];
    for &level in r.df[0]
        .iter()
        .chain(&r.df[1])
        .chain(&r.cf_sum)
        .chain(&r.cn_sum)
    {
        if level == 0 || level > q {
            return Err(ValidationFailure::LevelOutOfRange {
                node: Node::Relay,
                level,
            });
        }
        if std::mem::replace(&mut used[level], true) {
            return Err(ValidationFailure::Collision {
                node: Node::Relay,
                level,
            });
        }
    }

    // Interferer level c arrives at row q − n_c + c, relay level r at
    // q − n_r + r; both must be visible and coincide.
    for (split, &rl) in r.cn_sum.iter().enumerate() {
        let c = t1.cn_current[split];
        let aligned =
            c == t2.cn_current[split] && c <= p.n_c && rl <= p.n_r && p.n_r + c == p.n_c + rl;
        if !aligned {
            return Err(ValidationFailure::Misaligned { split });
        }
    }
    Ok(())
}
