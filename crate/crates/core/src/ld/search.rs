//! Brute-force allocation search, an independent check on the constructor.
//!
//! Both users share their CF, current CN and future CN levels, and the
//! relay's CN sums sit where the alignment condition puts them. Everything
//! else is enumerated: level sets, DF placements per user and the relay's
//! DF and CF-sum levels in every order. Sizes are tried in increasing
//! order of bits per user and every size class is visited, so the result
//! does not rely on feasibility being monotone.

use itertools::Itertools;

use super::allocation::{validate_allocation, Allocation, RelayLayout, TxLayout};
use super::channel::LdParams;
use super::engine::{receivers_can_decode, relay_can_decode, Scheme};
use super::sim::simulate;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Option<Allocation>,
    /// Relay probes plus full validator calls.
    pub candidates: usize,
    /// The enumeration cap was hit; `best` is only the best found so far.
    pub exhausted: bool,
}

impl SearchOutcome {
    pub fn bits_per_block(&self) -> usize {
        self.best.as_ref().map_or(0, Allocation::bits_per_block)
    }
}

const PROBE_BLOCKS: usize = 3;

enum Step {
    Found(Box<Allocation>),
    NotFound,
    Exhausted,
}

fn without(pool: &[usize], taken: &[usize]) -> Vec<usize> {
    pool.iter()
        .copied()
        .filter(|l| !taken.contains(l))
        .collect()
}

struct Searcher<'a> {
    p: &'a LdParams,
    budget: usize,
    candidates: usize,
}

impl Searcher<'_> {
    fn accept(&mut self, a: &Allocation) -> Option<bool> {
        self.candidates += 1;
        if self.candidates > self.budget {
            return None;
        }
        let scheme = Scheme::new(*self.p, a.clone(), PROBE_BLOCKS);
        let ok = receivers_can_decode(&scheme)
            && validate_allocation(a, self.p).is_valid()
            && simulate(self.p, a, 3, 0).is_ok_and(|r| r.errors == 0);
        Some(ok)
    }

    fn sizes(&mut self, cf: usize, cn: usize, df: usize) -> Step {
        let p = *self.p;
        let q = p.q();
        let lo = (p.n_c + 1).saturating_sub(p.n_r).max(1);
        let cn_pool: Vec<usize> = (lo..=p.n_c).collect();
        let visible: Vec<usize> = (1..=p.n_s).collect();
        let relay_levels: Vec<usize> = (1..=q).collect();

        for cn_current in cn_pool.iter().copied().combinations(cn) {
            let cn_sum: Vec<usize> = cn_current.iter().map(|c| c + p.n_r - p.n_c).collect();
            let relay_pool = without(&relay_levels, &cn_sum);
            for cn_future in visible.iter().copied().permutations(cn) {
                let rest = without(&visible, &cn_future);
                for cf_levels in rest.iter().copied().combinations(cf) {
                    let free = without(&rest, &cf_levels);
                    let df_sets: Vec<Vec<usize>> = free.iter().copied().combinations(df).collect();
                    for (i, d0) in df_sets.iter().enumerate() {
                        for d1 in &df_sets[i..] {
                            let tx = |d: &Vec<usize>| TxLayout {
                                cf: cf_levels.clone(),
                                cn_current: cn_current.clone(),
                                df: d.clone(),
                                cn_future: cn_future.clone(),
                            };
                            let mut probe = Allocation {
                                tx: [tx(d0), tx(d1)],
                                relay: RelayLayout::default(),
                            };
                            probe.relay.cf_sum = vec![0; cf];
                            probe.relay.cn_sum = cn_sum.clone();
                            probe.relay.df = [vec![0; df], vec![0; df]];
                            self.candidates += 1;
                            if self.candidates > self.budget {
                                return Step::Exhausted;
                            }
                            if !relay_can_decode(&Scheme::new(p, probe, PROBE_BLOCKS)) {
                                continue;
                            }
                            for cf_sum in relay_pool.iter().copied().permutations(cf) {
                                let pool = without(&relay_pool, &cf_sum);
                                for r0 in pool.iter().copied().permutations(df) {
                                    let pool = without(&pool, &r0);
                                    for r1 in pool.iter().copied().permutations(df) {
                                        let a = Allocation {
                                            tx: [tx(d0), tx(d1)],
                                            relay: RelayLayout {
                                                df: [r0.clone(), r1],
                                                cf_sum: cf_sum.clone(),
                                                cn_sum: cn_sum.clone(),
                                            },
                                        };
                                        match self.accept(&a) {
                                            None => return Step::Exhausted,
                                            Some(true) => return Step::Found(Box::new(a)),
                                            Some(false) => {}
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Step::NotFound
    }
}

/// Size vectors (cf, cn, df) that can possibly fit, grouped by bits per user.
fn size_classes(p: &LdParams) -> Vec<Vec<(usize, usize, usize)>> {
    let q = p.q();
    let max_cn = (p.n_c + 1).saturating_sub((p.n_c + 1).saturating_sub(p.n_r).max(1));
    let mut classes = vec![Vec::new(); p.n_s + 1];
    for cn in 0..=max_cn {
        for cf in 0..=p.n_s {
            for df in 0..=p.n_s {
                if cf + cn + df <= p.n_s && cf + cn + 2 * df <= q {
                    classes[cf + cn + df].push((cf, cn, df));
                }
            }
        }
    }
    classes
}

/// Largest valid allocation within `budget` probes and validator calls. Every
/// returned allocation also survives a short error-free simulation.
pub fn search_allocation(p: &LdParams, budget: usize) -> SearchOutcome {
    let mut s = Searcher {
        p,
        budget,
        candidates: 0,
    };
    let mut best = None;
    for class in size_classes(p).into_iter().skip(1) {
        for (cf, cn, df) in class {
            match s.sizes(cf, cn, df) {
                Step::Found(a) => {
                    best = Some(*a);
                    break;
                }
                Step::NotFound => {}
                Step::Exhausted => {
                    return SearchOutcome {
                        best,
                        candidates: budget,
                        exhausted: true,
                    };
                }
            }
        }
    }
    SearchOutcome {
        best,
        candidates: s.candidates,
        exhausted: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_params_reach_eight_bits() {
        let p = LdParams::new(2, 3, 6, 5).unwrap();
        let out = search_allocation(&p, 1_000_000);
        assert!(!out.exhausted);
        assert_eq!(out.bits_per_block(), 8);
    }

    #[test]
    fn out_of_scope_points_still_search() {
        for p in [
            LdParams::new(1, 2, 3, 3).unwrap(),
            LdParams::new(2, 2, 2, 2).unwrap(),
        ] {
            let out = search_allocation(&p, 1_000_000);
            assert!(!out.exhausted);
            assert!(out.bits_per_block() > 0, "{p}");
        }
    }

    #[test]
    fn tiny_budget_reports_exhaustion() {
        let p = LdParams::new(2, 3, 6, 5).unwrap();
        let out = search_allocation(&p, 3);
        assert!(out.exhausted);
        assert_eq!(out.candidates, 3);
    }

    #[test]
    fn size_classes_respect_relay_room() {
        let p = LdParams::new(2, 3, 6, 5).unwrap();
        let classes = size_classes(&p);
        assert!(classes[4].contains(&(1, 2, 1)));
        assert!(classes
            .iter()
            .flatten()
            .all(|&(cf, cn, df)| cf + cn + 2 * df <= 6));
    }
}
