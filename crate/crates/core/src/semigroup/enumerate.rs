//! Direct enumeration of a kind from its membership predicate.
//!
//! Image sequences are grown point by point, and a branch is dropped as soon
//! as its descents (or ascents) rule out every completion. This keeps the
//! work proportional to the output rather than to `|PT_n|`.

use std::collections::BTreeSet;

use crate::chain::{PartialTransformation, UNDEF};
use crate::error::{Error, Result};

use super::kind::{Orientation, SemigroupKind};

/// Largest number of elements [`elements_by_predicate`] will materialize.
pub const MAX_ENUMERATED: usize = 5_000_000;

/// Largest chain accepted by predicate enumeration (bit masks are `u64`).
pub const MAX_ENUM_N: usize = 16;

struct Walk {
    n: usize,
    partial: bool,
    injective: bool,
    orientation: Orientation,
    map: Vec<u8>,
    out: Vec<PartialTransformation>,
}

#[derive(Clone, Copy)]
struct Trail {
    first: u8,
    last: u8,
    descents: u32,
    ascents: u32,
    used: u64,
}

impl Walk {
    fn admissible(&self, t: &Trail) -> bool {
        match self.orientation {
            Orientation::Preserving => t.descents <= 1,
            Orientation::Oriented => t.descents <= 1 || t.ascents <= 1,
            Orientation::OrderPreserving => t.descents == 0,
            Orientation::Any => true,
        }
    }

    fn complete(&self, t: &Trail) -> bool {
        if t.first == UNDEF {
            return true;
        }
        let wrap_desc = u32::from(t.last > t.first);
        let wrap_asc = u32::from(t.last < t.first);
        match self.orientation {
            Orientation::Preserving => t.descents + wrap_desc <= 1,
            Orientation::Oriented => t.descents + wrap_desc <= 1 || t.ascents + wrap_asc <= 1,
            Orientation::OrderPreserving => t.descents == 0,
            Orientation::Any => true,
        }
    }

    fn run(&mut self, i: usize, t: Trail) -> Result<()> {
        if i == self.n {
            if self.complete(&t) {
                if self.out.len() == MAX_ENUMERATED {
                    return Err(Error::Capacity {
                        what: "predicate enumeration",
                        needed: MAX_ENUMERATED as u128 + 1,
                        limit: MAX_ENUMERATED as u128,
                    });
                }
                self.out.push(PartialTransformation::from_raw(self.map.clone()));
            }
            return Ok(());
        }
        for v in 0..self.n as u8 {
            if self.injective && t.used & (1 << v) != 0 {
                continue;
            }
            let next = if t.first == UNDEF {
                Trail {
                    first: v,
                    last: v,
                    used: 1 << v,
                    ..t
                }
            } else {
                Trail {
                    last: v,
                    descents: t.descents + u32::from(t.last > v),
                    ascents: t.ascents + u32::from(t.last < v),
                    used: t.used | 1 << v,
                    ..t
                }
            };
            if self.admissible(&next) {
                self.map[i] = v;
                self.run(i + 1, next)?;
            }
        }
        if self.partial {
            self.map[i] = UNDEF;
            self.run(i + 1, t)?;
        }
        Ok(())
    }
}

fn check_enum_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > MAX_ENUM_N {
        return Err(Error::Capacity {
            what: "chain size for enumeration",
            needed: n as u128,
            limit: MAX_ENUM_N as u128,
        });
    }
    Ok(())
}

/// Every member of `kind` on the `n`-chain, in canonical order.
pub fn elements_by_predicate(kind: SemigroupKind, n: usize) -> Result<Vec<PartialTransformation>> {
    check_enum_n(n)?;
    let mut walk = Walk {
        n,
        partial: kind.is_partial(),
        injective: kind.is_injective(),
        orientation: kind.orientation(),
        map: vec![UNDEF; n],
        out: Vec::new(),
    };
    let start = Trail {
        first: UNDEF,
        last: UNDEF,
        descents: 0,
        ascents: 0,
        used: 0,
    };
    walk.run(0, start)?;
    let mut out = walk.out;
    if kind.is_group() {
        out.retain(|t| kind.contains(t));
    }
    out.sort_unstable();
    Ok(out)
}

/// Every idempotent of `kind` on the `n`-chain, in canonical order.
///
/// An idempotent is fixed by its image `F` and sends the rest of its domain
/// into `F`, so only those maps are generated before the predicate filter.
pub fn idempotents_by_predicate(
    kind: SemigroupKind,
    n: usize,
) -> Result<Vec<PartialTransformation>> {
    check_enum_n(n)?;
    let partial = kind.is_partial();
    let mut out = Vec::new();
    for fixed in 0u64..1 << n {
        if fixed == 0 && !partial {
            continue;
        }
        let fix: Vec<u8> = (0..n as u8).filter(|&i| fixed & 1 << i != 0).collect();
        let free: Vec<usize> = (0..n).filter(|&i| fixed & 1 << i == 0).collect();
        // choices for each free point: a fixed point, or undefined
        let mut options: Vec<u8> = if kind.is_injective() { Vec::new() } else { fix.clone() };
        if partial {
            options.push(UNDEF);
        }
        if options.is_empty() && !free.is_empty() {
            continue;
        }
        let mut map = vec![UNDEF; n];
        for &i in &fix {
            map[i as usize] = i;
        }
        let mut digits = vec![0usize; free.len()];
        loop {
            for (slot, &d) in free.iter().zip(&digits) {
                map[*slot] = options[d];
            }
            let t = PartialTransformation::from_raw(map.clone());
            if kind.contains(&t) {
                out.push(t);
            }
            let mut pos = 0;
            while pos < digits.len() {
                digits[pos] += 1;
                if digits[pos] < options.len() {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == digits.len() {
                break;
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Idempotent counts of `kind` by rank `0..=n`.
pub fn idempotent_counts_by_rank(kind: SemigroupKind, n: usize) -> Result<Vec<usize>> {
    let mut counts = vec![0; n + 1];
    for e in idempotents_by_predicate(kind, n)? {
        counts[e.rank()] += 1;
    }
    Ok(counts)
}

/// Images of the partial identities of `kind` (used by the injective kinds).
pub fn partial_identities(n: usize) -> Vec<PartialTransformation> {
    let mut out: Vec<_> = (0u64..1 << n)
        .map(|mask| {
            let pts: BTreeSet<usize> = (1..=n).filter(|&i| mask & 1 << (i - 1) != 0).collect();
            PartialTransformation::partial_identity(n, &pts).expect("points lie in the chain")
        })
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use SemigroupKind::*;

    fn brute(kind: SemigroupKind, n: usize) -> Vec<PartialTransformation> {
        let total = (n + 1).pow(n as u32);
        let mut out = Vec::new();
        for mut code in 0..total {
            let mut map = vec![UNDEF; n];
            for slot in map.iter_mut() {
                let d = code % (n + 1);
                code /= n + 1;
                if d < n {
                    *slot = d as u8;
                }
            }
            let t = PartialTransformation::from_raw(map);
            if kind.contains(&t) {
                out.push(t);
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn small_sizes() {
        assert_eq!(elements_by_predicate(T, 2).unwrap().len(), 4);
        assert_eq!(elements_by_predicate(PT, 3).unwrap().len(), 64);
        assert_eq!(elements_by_predicate(OR, 3).unwrap(), elements_by_predicate(T, 3).unwrap());
        assert_eq!(elements_by_predicate(POR, 3).unwrap().len(), 64);
        assert_eq!(elements_by_predicate(PORI, 3).unwrap().len(), 34);
        assert_eq!(elements_by_predicate(C, 5).unwrap().len(), 5);
        assert_eq!(elements_by_predicate(D2, 5).unwrap().len(), 10);
    }

    #[test]
    fn pruned_walk_matches_filtering_the_universe() {
        for n in 1..=4 {
            for kind in SemigroupKind::ALL {
                assert_eq!(elements_by_predicate(kind, n).unwrap(), brute(kind, n), "{kind} {n}");
            }
        }
    }

    #[test]
    fn idempotents_match_filter() {
        for n in 1..=4 {
            for kind in SemigroupKind::ALL {
                let direct: Vec<_> = brute(kind, n).into_iter().filter(|t| t.is_idempotent()).collect();
                assert_eq!(idempotents_by_predicate(kind, n).unwrap(), direct, "{kind} {n}");
            }
        }
    }

    #[test]
    fn injective_idempotents_are_partial_identities() {
        for n in 1..=5 {
            assert_eq!(idempotents_by_predicate(POPI, n).unwrap(), partial_identities(n));
            assert_eq!(idempotents_by_predicate(PORI, n).unwrap(), partial_identities(n));
        }
    }

    #[test]
    fn guards() {
        assert!(elements_by_predicate(OP, 0).is_err());
        assert!(elements_by_predicate(OP, 17).is_err());
    }
}
