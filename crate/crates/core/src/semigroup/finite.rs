use std::collections::{HashMap, VecDeque};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{PartialTransformation, UNDEF};
use crate::error::{Error, Result};

use super::enumerate::elements_by_predicate;
use super::kind::SemigroupKind;

/// Largest Cayley table (in entries) that will be materialized.
pub const MAX_TABLE_ENTRIES: u128 = 100_000_000;

/// Largest closure materialized before the table is built.
pub const MAX_CLOSURE: usize = 10_000;

fn g(n: usize) -> PartialTransformation {
    PartialTransformation::from_raw((0..n).map(|i| ((i + 1) % n) as u8).collect())
}

fn h(n: usize) -> PartialTransformation {
    PartialTransformation::from_raw((0..n).map(|i| (n - 1 - i) as u8).collect())
}

/// Rank `n − 1` idempotents of `O_n`: `i ↦ i + 1` and `i + 1 ↦ i`.
fn o_idempotents(n: usize) -> Vec<PartialTransformation> {
    let mut out = Vec::new();
    for i in 0..n - 1 {
        let mut up: Vec<u8> = (0..n as u8).collect();
        up[i] = i as u8 + 1;
        let mut down: Vec<u8> = (0..n as u8).collect();
        down[i + 1] = i as u8;
        out.push(PartialTransformation::from_raw(up));
        out.push(PartialTransformation::from_raw(down));
    }
    out
}

/// The partial identities on `Ω ∖ {i}`.
fn co_point_identities(n: usize) -> Vec<PartialTransformation> {
    (0..n)
        .map(|i| {
            let mut m: Vec<u8> = (0..n as u8).collect();
            m[i] = UNDEF;
            PartialTransformation::from_raw(m)
        })
        .collect()
}

/// `s₁`: fixes `1..n−2`, sends `n−1 ↦ n`, undefined at `n`.
fn s1(n: usize) -> PartialTransformation {
    let mut m: Vec<u8> = (0..n as u8).collect();
    m[n - 2] = n as u8 - 1;
    m[n - 1] = UNDEF;
    PartialTransformation::from_raw(m)
}

fn transposition12(n: usize) -> PartialTransformation {
    let mut m: Vec<u8> = (0..n as u8).collect();
    m.swap(0, 1);
    PartialTransformation::from_raw(m)
}

fn collapse12(n: usize) -> PartialTransformation {
    let mut m: Vec<u8> = (0..n as u8).collect();
    m[1] = 0;
    PartialTransformation::from_raw(m)
}

/// A generating set for `kind`, units first (`g`, then `h`), then the rest.
pub fn generator_set(kind: SemigroupKind, n: usize) -> Result<Vec<PartialTransformation>> {
    use SemigroupKind::*;
    let min_n = match kind {
        C => 1,
        O | PO | POI | T | I | PT => 2,
        _ => 3,
    };
    if n < min_n {
        return Err(Error::Domain(format!("{kind} needs n >= {min_n}, got {n}")));
    }
    if n > crate::chain::MAX_N {
        return Err(Error::Domain(format!("n = {n} exceeds {}", crate::chain::MAX_N)));
    }
    let id = PartialTransformation::identity(n);
    let gens = match kind {
        OP => [vec![g(n)], o_idempotents(n)].concat(),
        OR => [vec![g(n), h(n)], o_idempotents(n)].concat(),
        POP => [vec![g(n)], o_idempotents(n), co_point_identities(n)].concat(),
        POR => [vec![g(n), h(n)], o_idempotents(n), co_point_identities(n)].concat(),
        POPI => vec![g(n), s1(n)],
        PORI => vec![g(n), h(n), s1(n)],
        C => vec![g(n)],
        D2 => vec![g(n), h(n)],
        O => [vec![id], o_idempotents(n)].concat(),
        PO => [vec![id], o_idempotents(n), co_point_identities(n)].concat(),
        POI => {
            // all of J_{n-1}: partial identities and the order-preserving shifts
            let mut v = vec![id];
            v.extend(
                elements_by_predicate(POI, n)?
                    .into_iter()
                    .filter(|t| t.rank() == n - 1),
            );
            v
        }
        T => vec![g(n), transposition12(n), collapse12(n)],
        I => vec![g(n), transposition12(n), co_point_identities(n).remove(0)],
        PT => vec![
            g(n),
            transposition12(n),
            collapse12(n),
            co_point_identities(n).remove(0),
        ],
    };
    Ok(gens)
}

/// An enumerated monoid with a complete Cayley table.
#[derive(Debug, Clone)]
pub struct FiniteSemigroup {
    kind: Option<SemigroupKind>,
    n: usize,
    elements: Vec<PartialTransformation>,
    index: HashMap<PartialTransformation, u32>,
    cayley: Vec<u32>,
    identity: Option<u32>,
    generators: Vec<u32>,
}

#[derive(Serialize)]
struct SemigroupJson<'a> {
    kind: Option<SemigroupKind>,
    n: usize,
    size: usize,
    elements: &'a [PartialTransformation],
    generators: &'a [u32],
}

/// BFS closure of `gens` under composition, with the full Cayley table.
pub fn closure(n: usize, gens: &[PartialTransformation]) -> Result<FiniteSemigroup> {
    if gens.is_empty() {
        return Err(Error::Domain("empty generating set".into()));
    }
    if gens.iter().any(|s| s.n() != n) {
        return Err(Error::Domain("generators act on different chains".into()));
    }
    let mut seen: HashMap<PartialTransformation, ()> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for s in gens {
        if seen.insert(s.clone(), ()).is_none() {
            order.push(s.clone());
            queue.push_back(s.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = x.then(s);
            if !seen.contains_key(&y) {
                if order.len() == MAX_CLOSURE {
                    return Err(Error::Capacity {
                        what: "closure",
                        needed: MAX_CLOSURE as u128 + 1,
                        limit: MAX_CLOSURE as u128,
                    });
                }
                seen.insert(y.clone(), ());
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut fs = FiniteSemigroup::from_elements(None, n, order)?;
    fs.generators = gens.iter().map(|s| fs.index[s]).collect();
    Ok(fs)
}

impl FiniteSemigroup {
    /// Builds the table for a set already known to be closed.
    fn from_elements(
        kind: Option<SemigroupKind>,
        n: usize,
        mut elements: Vec<PartialTransformation>,
    ) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        let size = elements.len();
        let entries = (size as u128) * (size as u128);
        if entries > MAX_TABLE_ENTRIES {
            return Err(Error::Capacity {
                what: "Cayley table entries",
                needed: entries,
                limit: MAX_TABLE_ENTRIES,
            });
        }
        let index: HashMap<PartialTransformation, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let rows: Vec<Vec<u32>> = elements
            .par_iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| index.get(&a.then(b)).copied().ok_or(()))
                    .collect::<std::result::Result<Vec<u32>, ()>>()
            })
            .collect::<std::result::Result<_, ()>>()
            .map_err(|_| Error::Domain("element set is not closed under composition".into()))?;
        let identity = index.get(&PartialTransformation::identity(n)).copied();
        Ok(Self {
            kind,
            n,
            elements,
            index,
            cayley: rows.concat(),
            identity,
            generators: Vec::new(),
        })
    }

    /// Closure of [`generator_set`], cross-checked against the predicate.
    pub fn build(kind: SemigroupKind, n: usize) -> Result<Self> {
        let gens = generator_set(kind, n)?;
        let mut fs = closure(n, &gens)?;
        let direct = elements_by_predicate(kind, n)?;
        if direct != fs.elements {
            return Err(Error::Domain(format!(
                "closure of the {kind} generators has {} elements, predicate gives {}",
                fs.elements.len(),
                direct.len()
            )));
        }
        fs.kind = Some(kind);
        Ok(fs)
    }

    pub fn kind(&self) -> Option<SemigroupKind> {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PartialTransformation] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &PartialTransformation {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, t: &PartialTransformation) -> Option<u32> {
        self.index.get(t).copied()
    }

    pub fn identity(&self) -> Option<u32> {
        self.identity
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// Row-major table: `cayley()[a * len + b] = a·b`.
    pub fn cayley(&self) -> &[u32] {
        &self.cayley
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.cayley[a as usize * self.elements.len() + b as usize]
    }

    /// `a^m` for `m >= 1`.
    pub fn pow(&self, a: u32, m: usize) -> u32 {
        assert!(m >= 1, "powers start at 1");
        (1..m).fold(a, |acc, _| self.mul(acc, a))
    }

    pub fn rank(&self, a: u32) -> usize {
        self.element(a).rank()
    }

    pub fn is_idempotent(&self, a: u32) -> bool {
        self.mul(a, a) == a
    }

    pub fn idempotents(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&a| self.is_idempotent(a)).collect()
    }

    /// Elements of rank `n`.
    pub fn units(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&a| self.rank(a) == self.n).collect()
    }

    /// Index of the empty map, when present.
    pub fn zero(&self) -> Option<u32> {
        self.index_of(&PartialTransformation::empty(self.n))
    }

    /// JSON with `kind`, `n`, `size`, `elements` and `generators`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SemigroupJson {
            kind: self.kind,
            n: self.n,
            size: self.len(),
            elements: &self.elements,
            generators: &self.generators,
        })
        .expect("serializable")
    }

    /// Width in bytes of each index in the binary table export.
    pub fn index_width(&self) -> u32 {
        match self.len() {
            0..=256 => 1,
            257..=65_536 => 2,
            _ => 4,
        }
    }

    /// Writes the table: a 16-byte header (`b"CAYL"`, `n`, size, index
    /// width, each little-endian `u32`) followed by row-major indices.
    pub fn write_cayley<W: Write>(&self, mut w: W) -> io::Result<()> {
        let width = self.index_width();
        w.write_all(b"CAYL")?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u32).to_le_bytes())?;
        w.write_all(&width.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.cayley.len() * width as usize);
        for &v in &self.cayley {
            buf.extend_from_slice(&v.to_le_bytes()[..width as usize]);
        }
        w.write_all(&buf)
    }
}

/// Reads a table written by [`FiniteSemigroup::write_cayley`], returning
/// `(n, size, entries)`.
pub fn read_cayley(bytes: &[u8]) -> Result<(u32, u32, Vec<u32>)> {
    let bad = |m: &str| Error::Domain(format!("malformed Cayley file: {m}"));
    if bytes.len() < 16 || &bytes[..4] != b"CAYL" {
        return Err(bad("header"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let (n, size, width) = (word(4), word(8), word(12) as usize);
    if !matches!(width, 1 | 2 | 4) {
        return Err(bad("index width"));
    }
    let body = &bytes[16..];
    if body.len() != size as usize * size as usize * width {
        return Err(bad("length"));
    }
    let entries = body
        .chunks_exact(width)
        .map(|c| {
            let mut b = [0u8; 4];
            b[..width].copy_from_slice(c);
            u32::from_le_bytes(b)
        })
        .collect();
    Ok((n, size, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use SemigroupKind::*;

    #[test]
    fn generator_examples() {
        assert_eq!(generator_set(C, 5).unwrap(), vec![g(5)]);
        let popi = generator_set(POPI, 4).unwrap();
        assert_eq!(popi[1].entries(), vec![Some(1), Some(2), Some(4), None]);
        let d8 = closure(4, &generator_set(D2, 4).unwrap()).unwrap();
        assert_eq!(d8.len(), 8);
        assert!(generator_set(OR, 2).is_err());
    }

    #[test]
    fn closures_match_predicates() {
        for n in 3..=4 {
            for kind in SemigroupKind::ALL {
                let s = FiniteSemigroup::build(kind, n).unwrap();
                assert_eq!(s.elements(), elements_by_predicate(kind, n).unwrap().as_slice());
            }
        }
        assert_eq!(FiniteSemigroup::build(OR, 3).unwrap().len(), 27);
        assert_eq!(FiniteSemigroup::build(PORI, 3).unwrap().len(), 34);
        assert_eq!(closure(5, &[g(5)]).unwrap().len(), 5);
    }

    #[test]
    fn monoid_laws() {
        for kind in SemigroupKind::TARGETS {
            let s = FiniteSemigroup::build(kind, 3).unwrap();
            let e = s.identity().expect("monoid");
            let m = s.len() as u32;
            for a in 0..m {
                assert_eq!(s.mul(a, e), a);
                assert_eq!(s.mul(e, a), a);
                for b in 0..m {
                    let ab = s.mul(a, b);
                    for c in 0..m {
                        assert_eq!(s.mul(ab, c), s.mul(a, s.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn cayley_binary_round_trip() {
        let s = FiniteSemigroup::build(POPI, 3).unwrap();
        let mut buf = Vec::new();
        s.write_cayley(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 31 * 31);
        let (n, size, entries) = read_cayley(&buf).unwrap();
        assert_eq!((n, size), (3, 31));
        assert_eq!(entries, s.cayley());
        assert!(read_cayley(&buf[..20]).is_err());
    }

    #[test]
    fn json_shape() {
        let s = FiniteSemigroup::build(OP, 3).unwrap();
        let v = s.to_json();
        assert_eq!(v["kind"], "op");
        assert_eq!(v["size"], 24);
        assert_eq!(v["elements"].as_array().unwrap().len(), 24);
    }
}
