//! Partial transformations of the chain `1 < 2 < ... < n`.
//!
//! Maps act on the right: `x(ab) = (xa)b`. Every value crossing the public
//! interface is 1-based; internally points are stored 0-based with
//! [`UNDEF`] marking points outside the domain.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sentinel for an undefined entry. It is larger than every defined value,
/// so the derived `Ord` puts "undefined" after all defined values.
pub const UNDEF: u8 = u8::MAX;

/// Largest supported chain.
pub const MAX_N: usize = 254;

/// A partial self-map of `{1, ..., n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialTransformation {
    map: Box<[u8]>,
}

/// Orientation flags of a partial transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientationClass {
    pub order_preserving: bool,
    pub order_reversing: bool,
    pub orientation_preserving: bool,
    pub orientation_reversing: bool,
}

impl OrientationClass {
    pub fn oriented(&self) -> bool {
        self.orientation_preserving || self.orientation_reversing
    }

    pub fn monotone(&self) -> bool {
        self.order_preserving || self.order_reversing
    }
}

/// The structural data of a partial transformation, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub domain: BTreeSet<usize>,
    pub image: BTreeSet<usize>,
    pub rank: usize,
    /// Partition of the domain into classes of points with equal image,
    /// ordered by least element.
    pub kernel: Vec<BTreeSet<usize>>,
    pub fixed_points: BTreeSet<usize>,
    pub is_idempotent: bool,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::Domain(format!("chain size {n} not in 1..={MAX_N}")));
    }
    Ok(())
}

fn check_values(seq: &[usize], n: usize) -> Result<()> {
    if let Some(bad) = seq.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::Domain(format!("value {bad} not in 1..={n}")));
    }
    Ok(())
}

/// Number of indices `i` with `a_i > a_{i+1}`, reading cyclically.
pub(crate) fn cyclic_descents<T: Ord>(seq: &[T]) -> usize {
    let t = seq.len();
    (0..t).filter(|&i| seq[i] > seq[(i + 1) % t]).count()
}

/// Number of indices `i` with `a_i < a_{i+1}`, reading cyclically.
pub(crate) fn cyclic_ascents<T: Ord>(seq: &[T]) -> usize {
    let t = seq.len();
    (0..t).filter(|&i| seq[i] < seq[(i + 1) % t]).count()
}

/// True iff the sequence has at most one cyclic descent.
pub fn is_cyclic(seq: &[usize], n: usize) -> Result<bool> {
    check_values(seq, n)?;
    Ok(cyclic_descents(seq) <= 1)
}

/// True iff the sequence has at most one cyclic ascent.
pub fn is_anticyclic(seq: &[usize], n: usize) -> Result<bool> {
    check_values(seq, n)?;
    Ok(cyclic_ascents(seq) <= 1)
}

impl PartialTransformation {
    /// Builds a transformation from 1-based entries, `None` meaning undefined.
    pub fn new(n: usize, entries: &[Option<usize>]) -> Result<Self> {
        check_n(n)?;
        if entries.len() != n {
            return Err(Error::Domain(format!(
                "expected {n} entries, got {}",
                entries.len()
            )));
        }
        let mut map = Vec::with_capacity(n);
        for e in entries {
            match *e {
                None => map.push(UNDEF),
                Some(v) if (1..=n).contains(&v) => map.push((v - 1) as u8),
                Some(v) => return Err(Error::Domain(format!("image {v} not in 1..={n}"))),
            }
        }
        Ok(Self { map: map.into() })
    }

    /// Builds a full transformation from 1-based images.
    pub fn full(images: &[usize]) -> Result<Self> {
        let entries: Vec<_> = images.iter().map(|&v| Some(v)).collect();
        Self::new(images.len(), &entries)
    }

    /// Builds from raw 0-based entries with [`UNDEF`]. Entries are trusted.
    pub(crate) fn from_raw(map: Vec<u8>) -> Self {
        debug_assert!(map.iter().all(|&v| v == UNDEF || (v as usize) < map.len()));
        Self { map: map.into() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw((0..n as u8).collect())
    }

    pub fn empty(n: usize) -> Self {
        Self::from_raw(vec![UNDEF; n])
    }

    /// The partial identity on a set of 1-based points.
    pub fn partial_identity(n: usize, points: &BTreeSet<usize>) -> Result<Self> {
        check_n(n)?;
        let mut map = vec![UNDEF; n];
        for &p in points {
            if p == 0 || p > n {
                return Err(Error::Domain(format!("point {p} not in 1..={n}")));
            }
            map[p - 1] = (p - 1) as u8;
        }
        Ok(Self::from_raw(map))
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// Raw 0-based entries.
    pub fn raw(&self) -> &[u8] {
        &self.map
    }

    /// Image of the 1-based point `x`, if defined.
    pub fn apply(&self, x: usize) -> Option<usize> {
        match self.map.get(x.checked_sub(1)?) {
            Some(&v) if v != UNDEF => Some(v as usize + 1),
            _ => None,
        }
    }

    /// 1-based entries, `None` for undefined points.
    pub fn entries(&self) -> Vec<Option<usize>> {
        self.map
            .iter()
            .map(|&v| (v != UNDEF).then(|| v as usize + 1))
            .collect()
    }

    /// Left-to-right composition, `x(self·other) = (x self) other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::Domain(format!(
                "cannot compose maps on chains of sizes {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(self.then(other))
    }

    /// Composition without the size check.
    pub(crate) fn then(&self, other: &Self) -> Self {
        let map = self
            .map
            .iter()
            .map(|&v| if v == UNDEF { UNDEF } else { other.map[v as usize] })
            .collect();
        Self { map }
    }

    pub fn is_full(&self) -> bool {
        self.map.iter().all(|&v| v != UNDEF)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.n()];
        for &v in self.map.iter().filter(|&&v| v != UNDEF) {
            if std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
        true
    }

    pub fn is_permutation(&self) -> bool {
        self.is_full() && self.is_injective()
    }

    pub fn rank(&self) -> usize {
        let mut seen = vec![false; self.n()];
        let mut r = 0;
        for &v in self.map.iter().filter(|&&v| v != UNDEF) {
            if !std::mem::replace(&mut seen[v as usize], true) {
                r += 1;
            }
        }
        r
    }

    pub fn domain_size(&self) -> usize {
        self.map.iter().filter(|&&v| v != UNDEF).count()
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        (0..self.n())
            .filter(|&i| self.map[i] != UNDEF)
            .map(|i| i + 1)
            .collect()
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.map
            .iter()
            .filter(|&&v| v != UNDEF)
            .map(|&v| v as usize + 1)
            .collect()
    }

    pub fn fixed_points(&self) -> BTreeSet<usize> {
        (0..self.n())
            .filter(|&i| self.map[i] as usize == i)
            .map(|i| i + 1)
            .collect()
    }

    /// Kernel classes ordered by least element.
    pub fn kernel(&self) -> Vec<BTreeSet<usize>> {
        let mut classes: Vec<(u8, BTreeSet<usize>)> = Vec::new();
        for (i, &v) in self.map.iter().enumerate().filter(|(_, &v)| v != UNDEF) {
            match classes.iter_mut().find(|(img, _)| *img == v) {
                Some((_, c)) => {
                    c.insert(i + 1);
                }
                None => classes.push((v, BTreeSet::from([i + 1]))),
            }
        }
        classes.into_iter().map(|(_, c)| c).collect()
    }

    pub fn is_idempotent(&self) -> bool {
        self.map
            .iter()
            .all(|&v| v == UNDEF || self.map[v as usize] == v)
    }

    pub fn structure(&self) -> Structure {
        Structure {
            domain: self.domain(),
            image: self.image(),
            rank: self.rank(),
            kernel: self.kernel(),
            fixed_points: self.fixed_points(),
            is_idempotent: self.is_idempotent(),
        }
    }

    /// Restriction to the 1-based point set `points`.
    pub fn restrict(&self, points: &BTreeSet<usize>) -> Self {
        let map = (0..self.n())
            .map(|i| if points.contains(&(i + 1)) { self.map[i] } else { UNDEF })
            .collect();
        Self { map }
    }

    /// Images of the domain points listed in increasing order, 0-based.
    pub(crate) fn image_sequence_raw(&self) -> Vec<u8> {
        self.map.iter().copied().filter(|&v| v != UNDEF).collect()
    }

    /// Images of the domain points listed in increasing order, 1-based.
    pub fn image_sequence(&self) -> Vec<usize> {
        self.image_sequence_raw()
            .into_iter()
            .map(|v| v as usize + 1)
            .collect()
    }

    pub fn classify_orientation(&self) -> OrientationClass {
        let seq = self.image_sequence_raw();
        OrientationClass {
            order_preserving: seq.windows(2).all(|w| w[0] <= w[1]),
            order_reversing: seq.windows(2).all(|w| w[0] >= w[1]),
            orientation_preserving: cyclic_descents(&seq) <= 1,
            orientation_reversing: cyclic_ascents(&seq) <= 1,
        }
    }

    pub fn is_orientation_preserving(&self) -> bool {
        cyclic_descents(&self.image_sequence_raw()) <= 1
    }

    pub fn is_orientation_reversing(&self) -> bool {
        cyclic_ascents(&self.image_sequence_raw()) <= 1
    }

    pub fn is_oriented(&self) -> bool {
        let seq = self.image_sequence_raw();
        cyclic_descents(&seq) <= 1 || cyclic_ascents(&seq) <= 1
    }

    /// Bit mask of the domain (bit `i` for point `i + 1`); requires `n <= 64`.
    pub(crate) fn domain_mask(&self) -> u64 {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNDEF)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Bit mask of the image; requires `n <= 64`.
    pub(crate) fn image_mask(&self) -> u64 {
        self.map
            .iter()
            .filter(|&&v| v != UNDEF)
            .fold(0, |m, &v| m | 1 << v)
    }

    /// Canonical kernel labelling: each defined point gets the least point of
    /// its class; undefined points get [`UNDEF`].
    pub(crate) fn kernel_labels(&self) -> Vec<u8> {
        let mut first = vec![UNDEF; self.n()];
        self.map
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == UNDEF {
                    UNDEF
                } else {
                    if first[v as usize] == UNDEF {
                        first[v as usize] = i as u8;
                    }
                    first[v as usize]
                }
            })
            .collect()
    }
}

impl fmt::Debug for PartialTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PartialTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match e {
                Some(v) => write!(f, "{v}")?,
                None => write!(f, "-")?,
            }
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct TransformationJson {
    n: usize,
    map: Vec<Option<usize>>,
}

impl Serialize for PartialTransformation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TransformationJson {
            n: self.n(),
            map: self.entries(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartialTransformation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = TransformationJson::deserialize(deserializer)?;
        PartialTransformation::new(raw.n, &raw.map).map_err(serde::de::Error::custom)
    }
}
