//! The rotation `g`, the reflection `h`, the groups `C_n` and `D_2n` they
//! generate, the permutations `σ_{x,k}` normalizing both, and brute-force
//! endomorphism enumeration for the two groups.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::chain::PartialTransformation;
use crate::error::{Error, Result};

/// Largest `n` for which [`normalizer_in_sn`] scans all of `S_n`.
pub const MAX_NORMALIZER_N: usize = 8;

/// A bijection of `{1, ..., n}`, acting on the right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Box<[u8]>,
}

impl Permutation {
    /// From 1-based images.
    pub fn new(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in images {
            if v == 0 || v > n || std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::Domain(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self {
            images: images.iter().map(|&v| (v - 1) as u8).collect(),
        })
    }

    fn from_raw(images: Vec<u8>) -> Self {
        Self {
            images: images.into(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw((0..n as u8).collect())
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] as usize + 1
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Self {
        Self::from_raw(self.images.iter().map(|&v| other.images[v as usize]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Self::from_raw(inv)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.n()), |acc, _| acc.then(self))
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.then(self);
            k += 1;
        }
        k
    }

    /// `σ⁻¹ · self · σ`.
    pub fn conjugate_by(&self, sigma: &Self) -> Self {
        sigma.inverse().then(self).then(sigma)
    }

    pub fn to_transformation(&self) -> PartialTransformation {
        PartialTransformation::from_raw(self.images.to_vec())
    }

    pub fn from_transformation(t: &PartialTransformation) -> Option<Self> {
        t.is_permutation().then(|| Self::from_raw(t.raw().to_vec()))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(serializer)
    }
}

/// The rotation `i ↦ i + 1` (with `n ↦ 1`).
pub fn make_g(n: usize) -> Permutation {
    Permutation::from_raw((0..n).map(|i| ((i + 1) % n) as u8).collect())
}

/// The reflection `i ↦ n − i + 1`.
pub fn make_h(n: usize) -> Permutation {
    Permutation::from_raw((0..n).map(|i| (n - 1 - i) as u8).collect())
}

/// A word `g^i` or `h g^i` naming an element of `D_2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DihedralWord {
    Rotation(usize),
    Reflection(usize),
}

impl DihedralWord {
    pub fn to_permutation(self, n: usize) -> Permutation {
        match self {
            DihedralWord::Rotation(i) => make_g(n).pow(i),
            DihedralWord::Reflection(i) => make_h(n).then(&make_g(n).pow(i)),
        }
    }
}

impl fmt::Display for DihedralWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DihedralWord::Rotation(i) => write!(f, "g^{i}"),
            DihedralWord::Reflection(i) => write!(f, "hg^{i}"),
        }
    }
}

impl Serialize for DihedralWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn require_n3(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("n = {n}, need n >= 3")));
    }
    Ok(())
}

/// `1, g, ..., g^{n-1}`.
pub fn cyclic_elements(n: usize) -> Vec<Permutation> {
    let g = make_g(n);
    std::iter::successors(Some(Permutation::identity(n)), |p| Some(p.then(&g)))
        .take(n)
        .collect()
}

/// `1, g, ..., g^{n-1}, h, hg, ..., hg^{n-1}`.
pub fn dihedral_elements(n: usize) -> Result<Vec<Permutation>> {
    require_n3(n)?;
    let rotations = cyclic_elements(n);
    let h = make_h(n);
    let reflections: Vec<_> = rotations.iter().map(|r| h.then(r)).collect();
    Ok(rotations.into_iter().chain(reflections).collect())
}

/// Words for the elements of `D_2n`, in the order of [`dihedral_elements`].
pub fn dihedral_words(n: usize) -> Vec<DihedralWord> {
    (0..n)
        .map(DihedralWord::Rotation)
        .chain((0..n).map(DihedralWord::Reflection))
        .collect()
}

/// Subgroup generated by a set of permutations.
pub fn generated_subgroup(n: usize, gens: &[Permutation]) -> BTreeSet<Permutation> {
    let mut elems = BTreeSet::from([Permutation::identity(n)]);
    let mut frontier = vec![Permutation::identity(n)];
    while let Some(x) = frontier.pop() {
        for s in gens {
            let y = x.then(s);
            if elems.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    elems
}

pub fn is_normal_in(sub: &BTreeSet<Permutation>, group: &[Permutation]) -> bool {
    group
        .iter()
        .all(|s| sub.iter().all(|x| sub.contains(&x.conjugate_by(s))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSubgroup {
    pub label: String,
    pub elements: BTreeSet<Permutation>,
}

/// The proper normal subgroups `⟨g^p⟩` (`p | n`) and, for even `n`,
/// `⟨g², h⟩` and `⟨g², hg⟩`. Each is checked to be normal before return.
pub fn proper_normal_subgroups_d2n(n: usize) -> Result<Vec<NamedSubgroup>> {
    let d2n = dihedral_elements(n)?;
    let g = make_g(n);
    let h = make_h(n);
    let mut subs: Vec<NamedSubgroup> = (1..=n)
        .filter(|p| n % p == 0)
        .map(|p| NamedSubgroup {
            label: format!("<g^{p}>"),
            elements: generated_subgroup(n, &[g.pow(p)]),
        })
        .collect();
    if n % 2 == 0 {
        subs.push(NamedSubgroup {
            label: "<g^2,h>".into(),
            elements: generated_subgroup(n, &[g.pow(2), h.clone()]),
        });
        subs.push(NamedSubgroup {
            label: "<g^2,hg>".into(),
            elements: generated_subgroup(n, &[g.pow(2), h.then(&g)]),
        });
    }
    for s in &subs {
        if !is_normal_in(&s.elements, &d2n) {
            return Err(Error::Domain(format!("{} is not normal in D_{}", s.label, 2 * n)));
        }
    }
    Ok(subs)
}

/// The parameters of `σ_{x,k}: i ↦ \overline{x + (i−1)k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SigmaXK {
    pub n: usize,
    pub x: usize,
    pub k: usize,
}

/// Reduction of `m` into `{1, ..., n}`.
pub fn reduce(m: i64, n: usize) -> usize {
    ((m - 1).rem_euclid(n as i64)) as usize + 1
}

impl SigmaXK {
    pub fn new(n: usize, x: usize, k: usize) -> Result<Self> {
        if n == 0 || !(1..=n).contains(&x) || !(1..=n).contains(&k) {
            return Err(Error::Domain(format!("x = {x}, k = {k} not in 1..={n}")));
        }
        if k.gcd(&n) != 1 {
            return Err(Error::Domain(format!("gcd({k}, {n}) != 1")));
        }
        Ok(Self { n, x, k })
    }

    pub fn to_permutation(self) -> Permutation {
        let images: Vec<usize> = (1..=self.n)
            .map(|i| reduce(self.x as i64 + (i as i64 - 1) * self.k as i64, self.n))
            .collect();
        Permutation::new(&images).expect("gcd(k, n) = 1 makes σ_{x,k} bijective")
    }
}

pub fn sigma_xk(n: usize, x: usize, k: usize) -> Result<Permutation> {
    SigmaXK::new(n, x, k).map(SigmaXK::to_permutation)
}

/// All `σ_{x,k}` with `gcd(k, n) = 1`, ordered by `(x, k)`.
pub fn sigma_family(n: usize) -> Vec<SigmaXK> {
    (1..=n)
        .cartesian_product((1..=n).filter(|k| k.gcd(&n) == 1))
        .map(|(x, k)| SigmaXK { n, x, k })
        .collect()
}

/// `{σ ∈ S_n : σ⁻¹Gσ = G}` by exhaustive scan of `S_n`.
pub fn normalizer_in_sn(n: usize, group: &[Permutation]) -> Result<BTreeSet<Permutation>> {
    if n > MAX_NORMALIZER_N {
        return Err(Error::Capacity {
            what: "symmetric group scan",
            needed: n as u128,
            limit: MAX_NORMALIZER_N as u128,
        });
    }
    if group.iter().any(|p| p.n() != n) {
        return Err(Error::Domain("group elements act on a different chain".into()));
    }
    let members: HashSet<&Permutation> = group.iter().collect();
    Ok((0..n as u8)
        .permutations(n)
        .map(Permutation::from_raw)
        .filter(|sigma| group.iter().all(|x| members.contains(&x.conjugate_by(sigma))))
        .collect())
}

pub fn totient(n: usize) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    C,
    D2,
}

/// One endomorphism of `C_n` or `D_2n`, given by generator images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupEndo {
    pub g: DihedralWord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<DihedralWord>,
    pub family: String,
    pub automorphism: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupEndoReport {
    pub group: GroupTag,
    pub n: usize,
    pub total_endomorphisms: usize,
    pub total_automorphisms: usize,
    pub endomorphisms: Vec<GroupEndo>,
}

/// The named endomorphism families, keyed by generator images.
/// For `C_n` the `h` slot is `None`.
pub fn named_families(tag: GroupTag, n: usize) -> BTreeMap<(DihedralWord, Option<DihedralWord>), String> {
    use DihedralWord::{Reflection as R, Rotation as G};
    let mut fam = BTreeMap::new();
    match tag {
        GroupTag::C => {
            for i in 0..n {
                fam.insert((G(i), None), format!("phi_{i}"));
            }
        }
        GroupTag::D2 => {
            fam.insert((G(0), Some(G(0))), "phi_0".to_string());
            for i in 0..n {
                for j in 0..n {
                    fam.insert((G(i), Some(R(j))), format!("phi_{i},{j}"));
                }
            }
            if n % 2 == 0 {
                let half = n / 2;
                fam.insert((G(0), Some(G(half))), "phi_n".into());
                for i in 0..n {
                    for j in 0..n {
                        if i.abs_diff(j) == half {
                            fam.insert((R(i), Some(R(j))), format!("xi_{i},{j}"));
                        }
                    }
                    fam.insert((R(i), Some(G(half))), format!("xi_{i}"));
                    fam.insert((R(i), Some(G(0))), format!("mu_{i}"));
                    fam.insert((R(i), Some(R(i))), format!("nu_{i}"));
                }
                fam.insert((G(half), Some(G(0))), "mu_n".into());
                fam.insert((G(half), Some(G(half))), "nu_n".into());
            }
        }
    }
    fam
}

/// Enumerates every endomorphism of `C_n` or `D_2n` by trying all
/// generator images against the defining relations.
pub fn group_endomorphisms(tag: GroupTag, n: usize) -> Result<GroupEndoReport> {
    require_n3(n)?;
    let words = dihedral_words(n);
    let perms: Vec<Permutation> = words.iter().map(|w| w.to_permutation(n)).collect();
    let id = Permutation::identity(n);
    let families = named_families(tag, n);
    let name = |key: &(DihedralWord, Option<DihedralWord>)| {
        families.get(key).cloned().unwrap_or_else(|| "unnamed".into())
    };

    let mut endos = Vec::new();
    match tag {
        GroupTag::C => {
            for (wa, a) in words.iter().zip(&perms).take(n) {
                if a.pow(n) == id {
                    let key = (*wa, None);
                    endos.push(GroupEndo {
                        g: *wa,
                        h: None,
                        family: name(&key),
                        automorphism: a.order() == n,
                    });
                }
            }
        }
        GroupTag::D2 => {
            for ((wa, a), (wb, b)) in words.iter().zip(&perms).cartesian_product(words.iter().zip(&perms)) {
                let relations = a.pow(n) == id && b.then(b) == id && a.then(b) == b.then(&a.pow(n - 1));
                if !relations {
                    continue;
                }
                let image: HashSet<Permutation> = (0..n)
                    .flat_map(|i| [a.pow(i), b.then(&a.pow(i))])
                    .collect();
                let key = (*wa, Some(*wb));
                endos.push(GroupEndo {
                    g: *wa,
                    h: Some(*wb),
                    family: name(&key),
                    automorphism: image.len() == 2 * n,
                });
            }
        }
    }
    Ok(GroupEndoReport {
        group: tag,
        n,
        total_endomorphisms: endos.len(),
        total_automorphisms: endos.iter().filter(|e| e.automorphism).count(),
        endomorphisms: endos,
    })
}
