//! Exhaustive endomorphism search by backtracking over generator images.
//!
//! Generators are assigned one level at a time. For level `j` the plan holds
//! the right Cayley graph edges `x · s_l` (`l <= j`) not covered by an earlier
//! level, in BFS order: an edge reaching a fresh element defines its image,
//! any other edge is a consistency check. A full assignment that survives all
//! checks respects every edge of the Cayley graph and so is a homomorphism.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::semigroup::{index_and_period, FiniteSemigroup};

const UNSET: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Op {
    y: u32,
    x: u32,
    gen: u32,
    define: bool,
}

#[derive(Debug, Clone)]
struct Level {
    gen: u32,
    forced: bool,
    ops: Vec<Op>,
}

/// The precomputed schedule for a semigroup and generator list.
#[derive(Debug, Clone)]
pub struct SearchPlan {
    size: usize,
    levels: Vec<Level>,
    candidates: Vec<Vec<u32>>,
}

impl SearchPlan {
    pub fn new(s: &FiniteSemigroup, gens: &[u32]) -> Result<Self> {
        let size = s.len();
        let mut defined = vec![false; size];
        let mut order: Vec<u32> = Vec::new();
        let mut levels = Vec::with_capacity(gens.len());
        for (j, &sj) in gens.iter().enumerate() {
            let forced = defined[sj as usize];
            let old = order.len();
            if !forced {
                defined[sj as usize] = true;
                order.push(sj);
            }
            let mut ops = Vec::new();
            let mut cursor = 0;
            while cursor < order.len() {
                let x = order[cursor];
                let fresh = cursor >= old;
                let gens_here: &[u32] = if fresh { &gens[..=j] } else { &gens[j..=j] };
                for &sl in gens_here {
                    let y = s.mul(x, sl);
                    let define = !defined[y as usize];
                    if define {
                        defined[y as usize] = true;
                        order.push(y);
                    }
                    ops.push(Op { y, x, gen: sl, define });
                }
                cursor += 1;
            }
            levels.push(Level { gen: sj, forced, ops });
        }
        if order.len() != size {
            return Err(Error::Domain(format!(
                "generators reach {} of {} elements",
                order.len(),
                size
            )));
        }
        let candidates = gens
            .iter()
            .map(|&sj| {
                // the image obeys every power relation of the generator
                let (a, p) = index_and_period(s, sj);
                (0..size as u32)
                    .filter(|&c| s.pow(c, a + p) == s.pow(c, a))
                    .collect()
            })
            .collect();
        Ok(SearchPlan {
            size,
            levels,
            candidates,
        })
    }

    /// Number of candidate images per generator level.
    pub fn candidate_counts(&self) -> Vec<usize> {
        self.levels
            .iter()
            .zip(&self.candidates)
            .map(|(l, c)| if l.forced { 1 } else { c.len() })
            .collect()
    }
}

struct Search<'a> {
    s: &'a FiniteSemigroup,
    plan: &'a SearchPlan,
    deadline: Option<Instant>,
    abort: &'a AtomicBool,
    nodes: &'a AtomicU64,
}

impl Search<'_> {
    #[inline]
    fn run_ops(&self, img: &mut [u32], ops: &[Op]) -> bool {
        for op in ops {
            let v = self.s.mul(img[op.x as usize], img[op.gen as usize]);
            if op.define {
                img[op.y as usize] = v;
            } else if img[op.y as usize] != v {
                return false;
            }
        }
        true
    }

    fn over_budget(&self) -> bool {
        if self.abort.load(Ordering::Relaxed) {
            return true;
        }
        let count = self.nodes.fetch_add(1, Ordering::Relaxed);
        if count % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.abort.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    fn assign(&self, level: usize, img: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, candidate: u32) {
        let lv = &self.plan.levels[level];
        if !lv.forced {
            img[lv.gen as usize] = candidate;
        }
        if self.run_ops(img, &lv.ops) {
            self.descend(level + 1, img, out);
        }
    }

    fn descend(&self, level: usize, img: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if self.over_budget() {
            return;
        }
        if level == self.plan.levels.len() {
            out.push(img.clone());
            return;
        }
        if self.plan.levels[level].forced {
            self.assign(level, img, out, UNSET);
        } else {
            for &c in &self.plan.candidates[level] {
                self.assign(level, img, out, c);
            }
        }
    }
}

/// Every endomorphism of `s` as an image array, sorted. The search fans
/// out over the first generator's candidates.
pub fn search_endomorphisms(
    s: &FiniteSemigroup,
    gens: &[u32],
    budget: Option<Duration>,
) -> Result<Vec<Vec<u32>>> {
    let plan = SearchPlan::new(s, gens)?;
    let abort = AtomicBool::new(false);
    let nodes = AtomicU64::new(0);
    let search = Search {
        s,
        plan: &plan,
        deadline: budget.map(|b| Instant::now() + b),
        abort: &abort,
        nodes: &nodes,
    };
    let first: Vec<u32> = if plan.levels[0].forced {
        vec![UNSET]
    } else {
        plan.candidates[0].clone()
    };
    let mut found: Vec<Vec<u32>> = first
        .par_iter()
        .flat_map_iter(|&c| {
            let mut img = vec![UNSET; plan.size];
            let mut out = Vec::new();
            search.assign(0, &mut img, &mut out, c);
            out
        })
        .collect();
    if abort.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded(budget.unwrap_or_default()));
    }
    found.sort_unstable();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::SemigroupKind;

    #[test]
    fn cyclic_group_has_n_endomorphisms() {
        for n in 3..=7 {
            let c = FiniteSemigroup::build(SemigroupKind::C, n).unwrap();
            let found = search_endomorphisms(&c, c.generators(), None).unwrap();
            assert_eq!(found.len(), n);
        }
    }

    #[test]
    fn dihedral_counts() {
        let d6 = FiniteSemigroup::build(SemigroupKind::D2, 3).unwrap();
        assert_eq!(search_endomorphisms(&d6, d6.generators(), None).unwrap().len(), 10);
        let d8 = FiniteSemigroup::build(SemigroupKind::D2, 4).unwrap();
        assert_eq!(search_endomorphisms(&d8, d8.generators(), None).unwrap().len(), 36);
    }

    #[test]
    fn results_are_homomorphisms() {
        let s = FiniteSemigroup::build(SemigroupKind::POPI, 3).unwrap();
        let m = s.len() as u32;
        for img in search_endomorphisms(&s, s.generators(), None).unwrap() {
            for a in 0..m {
                for b in 0..m {
                    assert_eq!(img[s.mul(a, b) as usize], s.mul(img[a as usize], img[b as usize]));
                }
            }
        }
    }

    #[test]
    fn incomplete_generators_rejected() {
        let s = FiniteSemigroup::build(SemigroupKind::OP, 3).unwrap();
        assert!(SearchPlan::new(&s, &s.generators()[..1]).is_err());
    }

    #[test]
    fn zero_budget_aborts() {
        let s = FiniteSemigroup::build(SemigroupKind::POR, 3).unwrap();
        let r = search_endomorphisms(&s, s.generators(), Some(Duration::ZERO));
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
    }
}
