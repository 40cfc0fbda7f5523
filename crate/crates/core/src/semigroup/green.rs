use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

use super::finite::FiniteSemigroup;

/// Green's relations of a transformation monoid, read off from images,
/// kernels and ranks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreenData {
    pub rank: Vec<u32>,
    pub image_id: Vec<u32>,
    /// Kernel classes together with the domain they partition.
    pub kernel_id: Vec<u32>,
    pub domain_id: Vec<u32>,
    pub l_class: Vec<u32>,
    pub r_class: Vec<u32>,
    pub h_class: Vec<u32>,
    pub j_class: Vec<u32>,
    /// Members of each H-class.
    pub h_members: Vec<Vec<u32>>,
    /// H-classes inside each J-class.
    pub j_h_classes: Vec<Vec<u32>>,
    /// Rank of each J-class.
    pub j_rank: Vec<u32>,
    /// Whether each H-class contains an idempotent.
    pub h_is_group: Vec<bool>,
}

/// Labels values by first occurrence.
fn label<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Vec<u32> {
    let mut ids = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let next = ids.len() as u32;
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

fn group_by(ids: &[u32]) -> Vec<Vec<u32>> {
    let count = ids.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut out = vec![Vec::new(); count];
    for (a, &c) in ids.iter().enumerate() {
        out[c as usize].push(a as u32);
    }
    out
}

impl GreenData {
    pub fn compute(s: &FiniteSemigroup) -> Self {
        let es = s.elements();
        let image_id = label(es.iter().map(|t| t.image_mask()));
        let kernel_id = label(es.iter().map(|t| t.kernel_labels()));
        let domain_id = label(es.iter().map(|t| t.domain_mask()));
        let rank: Vec<u32> = es.iter().map(|t| t.rank() as u32).collect();
        let h_class = label(image_id.iter().zip(&kernel_id));
        // J-classes numbered by increasing rank
        let mut ranks: Vec<u32> = rank.clone();
        ranks.sort_unstable();
        ranks.dedup();
        let j_of_rank: HashMap<u32, u32> = ranks.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
        let j_class: Vec<u32> = rank.iter().map(|r| j_of_rank[r]).collect();
        let h_members = group_by(&h_class);
        let mut j_h_classes = vec![Vec::new(); ranks.len()];
        for (hc, members) in h_members.iter().enumerate() {
            j_h_classes[j_class[members[0] as usize] as usize].push(hc as u32);
        }
        let h_is_group = h_members
            .iter()
            .map(|m| m.iter().any(|&a| s.is_idempotent(a)))
            .collect();
        GreenData {
            l_class: image_id.clone(),
            r_class: kernel_id.clone(),
            rank,
            image_id,
            kernel_id,
            domain_id,
            h_class,
            j_class,
            h_members,
            j_h_classes,
            j_rank: ranks,
            h_is_group,
        }
    }

    pub fn l_related(&self, a: u32, b: u32) -> bool {
        self.l_class[a as usize] == self.l_class[b as usize]
    }

    pub fn r_related(&self, a: u32, b: u32) -> bool {
        self.r_class[a as usize] == self.r_class[b as usize]
    }

    pub fn h_related(&self, a: u32, b: u32) -> bool {
        self.h_class[a as usize] == self.h_class[b as usize]
    }

    pub fn j_related(&self, a: u32, b: u32) -> bool {
        self.j_class[a as usize] == self.j_class[b as usize]
    }

    pub fn j_class_count(&self) -> usize {
        self.j_rank.len()
    }

    /// Members of the H-class of `a`.
    pub fn h_class_of(&self, a: u32) -> &[u32] {
        &self.h_members[self.h_class[a as usize] as usize]
    }
}

/// `I_k = {s : rank(s) <= k}`.
pub fn ideal(s: &FiniteSemigroup, k: usize) -> Result<Vec<u32>> {
    if k > s.n() {
        return Err(Error::Domain(format!("rank {k} exceeds n = {}", s.n())));
    }
    Ok((0..s.len() as u32).filter(|&a| s.rank(a) <= k).collect())
}

/// Elements of rank exactly `k`.
pub fn j_class(s: &FiniteSemigroup, k: usize) -> Vec<u32> {
    (0..s.len() as u32).filter(|&a| s.rank(a) == k).collect()
}

pub fn idempotents_of_rank(s: &FiniteSemigroup, k: usize) -> Vec<u32> {
    (0..s.len() as u32)
        .filter(|&a| s.rank(a) == k && s.is_idempotent(a))
        .collect()
}

/// The power sequence of `a`: index `i` and period `p` with `a^{i+p} = a^i`
/// minimal.
pub fn index_and_period(s: &FiniteSemigroup, a: u32) -> (usize, usize) {
    let mut first_seen = HashMap::new();
    let mut x = a;
    let mut m = 1;
    loop {
        if let Some(&i) = first_seen.get(&x) {
            return (i, m - i);
        }
        first_seen.insert(x, m);
        x = s.mul(x, a);
        m += 1;
    }
}

/// Order of `a` in its group H-class, or `None` if `a` is not a group element.
pub fn element_order(s: &FiniteSemigroup, a: u32) -> Option<usize> {
    match index_and_period(s, a) {
        (1, p) => Some(p),
        _ => None,
    }
}

/// The identity of the cyclic subgroup generated by a group element
/// (the idempotent power of `a`).
pub fn idempotent_power(s: &FiniteSemigroup, a: u32) -> u32 {
    let (i, p) = index_and_period(s, a);
    // the unique idempotent in the cycle is a^m with m ≡ 0 (mod p), m >= i
    let m = i.div_ceil(p) * p;
    s.pow(a, m.max(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "order", rename_all = "lowercase")]
pub enum GroupStructure {
    Cyclic(usize),
    Dihedral(usize),
    Other(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupHClass {
    pub idempotent: u32,
    pub elements: Vec<u32>,
    pub structure: GroupStructure,
}

/// The maximal subgroup with identity `e`, identified by element orders.
pub fn group_h_class(s: &FiniteSemigroup, green: &GreenData, e: u32) -> Result<GroupHClass> {
    if !s.is_idempotent(e) {
        return Err(Error::NotIdempotent(e as usize));
    }
    let elements = green.h_class_of(e).to_vec();
    let size = elements.len();
    let orders: Vec<usize> = elements
        .iter()
        .map(|&a| element_order(s, a).expect("members of a group H-class are group elements"))
        .collect();
    let structure = if orders.contains(&size) {
        GroupStructure::Cyclic(size)
    } else if size % 2 == 0 && size >= 6 {
        let half = size / 2;
        let rotation = elements.iter().zip(&orders).find(|(_, &o)| o == half).map(|(&a, _)| a);
        match rotation {
            Some(r) => {
                let rotations: Vec<u32> = (1..=half).map(|m| s.pow(r, m)).collect();
                let outside_are_involutions = elements
                    .iter()
                    .zip(&orders)
                    .filter(|(a, _)| !rotations.contains(a))
                    .all(|(_, &o)| o == 2);
                if outside_are_involutions {
                    GroupStructure::Dihedral(size)
                } else {
                    GroupStructure::Other(size)
                }
            }
            None => GroupStructure::Other(size),
        }
    } else {
        GroupStructure::Other(size)
    };
    Ok(GroupHClass {
        idempotent: e,
        elements,
        structure,
    })
}

/// How a family of idempotents must interact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMode {
    /// For all `i < j`, `e_i e_j` or `e_j e_i` lies in `I_{k−1}`.
    EitherOrder,
    /// For all `i < j`, `e_i e_j` lies in `I_{k−1}`.
    Ordered,
}

/// Searches for `size` idempotents of rank `k` pairwise multiplying into
/// `I_{k−1}` as required by `mode`.
pub fn find_idempotent_family(
    s: &FiniteSemigroup,
    k: usize,
    size: usize,
    mode: FamilyMode,
) -> Option<Vec<u32>> {
    if k == 0 {
        return None;
    }
    let es = idempotents_of_rank(s, k);
    let low = |a: u32, b: u32| s.rank(s.mul(a, b)) < k;
    let compatible = |prev: u32, next: u32| match mode {
        FamilyMode::EitherOrder => low(prev, next) || low(next, prev),
        FamilyMode::Ordered => low(prev, next),
    };

    fn extend(
        es: &[u32],
        chosen: &mut Vec<u32>,
        used: &mut Vec<bool>,
        size: usize,
        compatible: &dyn Fn(u32, u32) -> bool,
        symmetric: bool,
    ) -> bool {
        if chosen.len() == size {
            return true;
        }
        // for a symmetric relation a clique can be built in index order
        let start = if symmetric {
            chosen.last().map_or(0, |&c| es.iter().position(|&e| e == c).unwrap() + 1)
        } else {
            0
        };
        for i in start..es.len() {
            if used[i] || !chosen.iter().all(|&c| compatible(c, es[i])) {
                continue;
            }
            used[i] = true;
            chosen.push(es[i]);
            if extend(es, chosen, used, size, compatible, symmetric) {
                return true;
            }
            chosen.pop();
            used[i] = false;
        }
        false
    }

    let mut chosen = Vec::new();
    let mut used = vec![false; es.len()];
    let symmetric = mode == FamilyMode::EitherOrder;
    extend(&es, &mut chosen, &mut used, size, &compatible, symmetric).then_some(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::SemigroupKind::{self, *};

    fn build(kind: SemigroupKind, n: usize) -> FiniteSemigroup {
        FiniteSemigroup::build(kind, n).unwrap()
    }

    /// `L`, `R` and `J` from principal ideals of the Cayley table.
    fn ideal_oracle(s: &FiniteSemigroup) -> (Vec<Vec<bool>>, Vec<Vec<bool>>, Vec<Vec<bool>>) {
        let m = s.len() as u32;
        let left: Vec<Vec<u32>> = (0..m)
            .map(|a| {
                let mut v: Vec<u32> = (0..m).map(|x| s.mul(x, a)).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let right: Vec<Vec<u32>> = (0..m)
            .map(|a| {
                let mut v: Vec<u32> = (0..m).map(|x| s.mul(a, x)).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let two: Vec<Vec<u32>> = (0..m)
            .map(|a| {
                let mut v: Vec<u32> = left[a as usize]
                    .iter()
                    .flat_map(|&y| (0..m).map(move |x| (y, x)))
                    .map(|(y, x)| s.mul(y, x))
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let rel = |sets: &Vec<Vec<u32>>| {
            (0..m as usize)
                .map(|a| (0..m as usize).map(|b| sets[a] == sets[b]).collect())
                .collect()
        };
        (rel(&left), rel(&right), rel(&two))
    }

    #[test]
    fn descriptions_match_ideal_oracle() {
        for n in 3..=4 {
            for kind in SemigroupKind::TARGETS {
                let s = build(kind, n);
                let gd = GreenData::compute(&s);
                let (l, r, j) = ideal_oracle(&s);
                for a in 0..s.len() as u32 {
                    for b in 0..s.len() as u32 {
                        assert_eq!(gd.l_related(a, b), l[a as usize][b as usize], "{kind}{n} L");
                        assert_eq!(gd.r_related(a, b), r[a as usize][b as usize], "{kind}{n} R");
                        assert_eq!(gd.j_related(a, b), j[a as usize][b as usize], "{kind}{n} J");
                        if kind.is_injective() {
                            let same_dom = gd.domain_id[a as usize] == gd.domain_id[b as usize];
                            assert_eq!(gd.r_related(a, b), same_dom);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn j_class_counts() {
        assert_eq!(GreenData::compute(&build(PORI, 3)).j_class_count(), 4);
        assert_eq!(GreenData::compute(&build(OP, 3)).j_class_count(), 3);
    }

    #[test]
    fn units_of_op_form_c_n() {
        let s = build(OP, 4);
        let gd = GreenData::compute(&s);
        let id = s.identity().unwrap();
        let h = group_h_class(&s, &gd, id).unwrap();
        assert_eq!(h.structure, GroupStructure::Cyclic(4));
    }

    #[test]
    fn group_h_class_examples() {
        let pop = build(POP, 4);
        let gd = GreenData::compute(&pop);
        let units = group_h_class(&pop, &gd, pop.identity().unwrap()).unwrap();
        assert_eq!(units.structure, GroupStructure::Cyclic(4));

        let or = build(OR, 4);
        let gd = GreenData::compute(&or);
        let units = group_h_class(&or, &gd, or.identity().unwrap()).unwrap();
        assert_eq!(units.structure, GroupStructure::Dihedral(8));

        let pori = build(PORI, 5);
        let gd = GreenData::compute(&pori);
        let e = idempotents_of_rank(&pori, 2)[0];
        assert_eq!(group_h_class(&pori, &gd, e).unwrap().structure, GroupStructure::Cyclic(2));
        let not_idem = (0..pori.len() as u32).find(|&a| !pori.is_idempotent(a)).unwrap();
        assert!(group_h_class(&pori, &gd, not_idem).is_err());
    }

    #[test]
    fn maximal_subgroups_by_rank() {
        for kind in SemigroupKind::TARGETS {
            let s = build(kind, 4);
            let gd = GreenData::compute(&s);
            for e in s.idempotents() {
                let k = s.rank(e);
                if k == 0 {
                    continue;
                }
                let expected = if kind.has_reflection() && k >= 3 {
                    GroupStructure::Dihedral(2 * k)
                } else {
                    GroupStructure::Cyclic(k)
                };
                assert_eq!(group_h_class(&s, &gd, e).unwrap().structure, expected, "{kind} rank {k}");
            }
        }
    }

    #[test]
    fn ideals() {
        let por = build(POR, 3);
        assert_eq!(ideal(&por, 0).unwrap(), vec![por.zero().unwrap()]);
        let op = build(OP, 3);
        assert_eq!(ideal(&op, 3).unwrap().len(), 24);
        assert!(ideal(&op, 4).is_err());
        for k in 0..=3 {
            let i = ideal(&por, k).unwrap();
            for &a in &i {
                for b in 0..por.len() as u32 {
                    assert!(i.contains(&por.mul(a, b)) && i.contains(&por.mul(b, a)));
                }
            }
        }
    }

    #[test]
    fn idempotent_counts() {
        let op = build(OP, 3);
        assert_eq!(idempotents_of_rank(&op, 1).len(), 3);
        assert_eq!(idempotents_of_rank(&op, 2).len(), 6);
        assert_eq!(op.idempotents().len(), 10);
        let popi = build(POPI, 4);
        for (k, c) in [1, 4, 6, 4, 1].into_iter().enumerate() {
            assert_eq!(idempotents_of_rank(&popi, k).len(), c);
        }
    }

    #[test]
    fn orders() {
        let s = build(OR, 4);
        let g = s.generators()[0];
        let h = s.generators()[1];
        assert_eq!(element_order(&s, g), Some(4));
        assert_eq!(element_order(&s, h), Some(2));
        for e in s.idempotents() {
            assert_eq!(element_order(&s, e), Some(1));
        }
        // a nilpotent-like element of PORI is not a group element
        let pori = build(PORI, 3);
        let s1 = pori.generators()[2];
        assert_eq!(element_order(&pori, s1), None);
    }

    #[test]
    fn idempotent_families() {
        for (kind, n) in [(OP, 4), (OR, 4), (POPI, 3), (POP, 4), (PORI, 4), (POR, 3)] {
            let s = build(kind, n);
            for k in (n + 2) / 2..n {
                let fam = find_idempotent_family(&s, k, n - 1, FamilyMode::EitherOrder);
                assert!(fam.is_some(), "{kind}{n} k={k}");
            }
        }
        let popi = build(POPI, 4);
        for k in 1..4 {
            assert!(find_idempotent_family(&popi, k, 4, FamilyMode::Ordered).is_some());
        }
    }
}
