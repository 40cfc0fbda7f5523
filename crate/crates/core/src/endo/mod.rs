//! Endomorphisms of the six oriented monoids: the seven constructor
//! families, an independent exhaustive search, structural classification,
//! and kernel shapes.

mod search;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::time::Duration;

use serde::Serialize;

use crate::chain::{PartialTransformation, UNDEF};
use crate::error::{Error, Result};
use crate::groups::{dihedral_words, make_g, make_h, sigma_family, DihedralWord, SigmaXK};
use crate::semigroup::{element_order, FiniteSemigroup, GreenData, SemigroupKind};

pub use search::{search_endomorphisms, SearchPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum T6Variant {
    A,
    B,
    C,
}

/// The family an endomorphism belongs to, with its parameters. Element
/// parameters are indices into the semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", content = "params")]
pub enum EndoType {
    T1 { sigma: DihedralWord },
    T2 { sigma: SigmaXK },
    T3 { e: u32, f: u32 },
    T4 { g0: u32, p: usize },
    T5 { g0: u32, h0: u32, p: usize },
    T6 { h0: u32, f: u32, variant: T6Variant },
    T7 { e: u32 },
}

impl EndoType {
    /// The type number, 1 to 7.
    pub fn number(&self) -> u8 {
        match self {
            EndoType::T1 { .. } => 1,
            EndoType::T2 { .. } => 2,
            EndoType::T3 { .. } => 3,
            EndoType::T4 { .. } => 4,
            EndoType::T5 { .. } => 5,
            EndoType::T6 { .. } => 6,
            EndoType::T7 { .. } => 7,
        }
    }
}

/// A self-map of a [`FiniteSemigroup`] as an index array. Equality,
/// ordering and hashing look only at the images.
#[derive(Debug, Clone, Serialize)]
pub struct Endomorphism {
    pub images: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<EndoType>,
}

impl Endomorphism {
    pub fn untagged(images: Vec<u32>) -> Self {
        Self { images, tag: None }
    }

    pub fn is_bijective(&self) -> bool {
        let distinct: BTreeSet<_> = self.images.iter().collect();
        distinct.len() == self.images.len()
    }

    pub fn is_constant(&self) -> bool {
        self.images.windows(2).all(|w| w[0] == w[1])
    }

    /// `{"type", "params", "images"}` with element parameters written out
    /// as transformations.
    pub fn to_json(&self, s: &FiniteSemigroup) -> serde_json::Value {
        let elem = |i: u32| serde_json::to_value(s.element(i)).expect("serializable");
        let (ty, params) = match self.tag {
            None => (serde_json::Value::Null, serde_json::Value::Null),
            Some(t) => {
                let params = match t {
                    EndoType::T1 { sigma } => serde_json::json!({ "sigma": sigma }),
                    EndoType::T2 { sigma } => serde_json::json!({ "sigma": sigma }),
                    EndoType::T3 { e, f } => serde_json::json!({ "e": elem(e), "f": elem(f) }),
                    EndoType::T4 { g0, p } => serde_json::json!({ "g0": elem(g0), "p": p }),
                    EndoType::T5 { g0, h0, p } => {
                        serde_json::json!({ "g0": elem(g0), "h0": elem(h0), "p": p })
                    }
                    EndoType::T6 { h0, f, variant } => {
                        serde_json::json!({ "h0": elem(h0), "f": elem(f), "variant": variant })
                    }
                    EndoType::T7 { e } => serde_json::json!({ "e": elem(e) }),
                };
                (format!("T{}", t.number()).into(), params)
            }
        };
        serde_json::json!({ "type": ty, "params": params, "images": self.images })
    }
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl Eq for Endomorphism {}

impl Hash for Endomorphism {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.images.hash(state);
    }
}

impl PartialOrd for Endomorphism {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Endomorphism {
    fn cmp(&self, other: &Self) -> Ordering {
        self.images.cmp(&other.images)
    }
}

/// Congruence class on the relevant maximal subgroup in a kernel shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PiShape {
    Identity,
    Universal,
    Proper,
}

/// The kernel of an endomorphism: universal, or `ρ^{J_k}_π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum KernelShape {
    Universal,
    Rho {
        k: usize,
        collapses_ideal: bool,
        within_h_only: bool,
        pi: PiShape,
    },
}

/// `φ₀` on `PT_n` (`n >= 3`).
pub fn phi0(t: &PartialTransformation) -> PartialTransformation {
    let n = t.n();
    let rank = t.rank();
    if rank == n {
        return t.clone();
    }
    let mut out = vec![UNDEF; n];
    if rank + 1 == n {
        let raw = t.raw();
        let missing_image = (0..n as u8).find(|v| !raw.contains(v)).expect("rank n - 1");
        if let Some(i) = raw.iter().position(|&v| v == UNDEF) {
            out[i] = missing_image;
        } else {
            // the one kernel pair {i, j}
            let (i, j) = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| raw[i] == raw[j])
                .expect("full map of rank n - 1 has a kernel pair");
            out[i] = missing_image;
            out[j] = missing_image;
        }
    }
    PartialTransformation::from_raw(out)
}

/// Precomputed data shared by the constructors and the classifier.
#[derive(Debug, Clone)]
pub struct EndoContext<'a> {
    pub s: &'a FiniteSemigroup,
    pub kind: SemigroupKind,
    pub green: GreenData,
    /// `g^i` for `0 <= i < n`.
    pub rotations: Vec<u32>,
    /// `h g^i` for `0 <= i < n`; empty when `h ∉ S`.
    pub reflections: Vec<u32>,
    word_of: HashMap<u32, DihedralWord>,
    units: Vec<u32>,
    rest: Vec<u32>,
}

impl<'a> EndoContext<'a> {
    pub fn new(s: &'a FiniteSemigroup) -> Result<Self> {
        let kind = s
            .kind()
            .filter(|k| k.is_target())
            .ok_or_else(|| Error::Unsupported("endomorphisms are classified for the six oriented kinds".into()))?;
        let n = s.n();
        if n < 3 {
            return Err(Error::Domain(format!("n = {n}, need n >= 3")));
        }
        let g = make_g(n);
        let h = make_h(n);
        let look = |p: &crate::groups::Permutation| {
            s.index_of(&p.to_transformation())
                .ok_or_else(|| Error::Domain("unit group is missing an element".into()))
        };
        let rotations: Vec<u32> = (0..n).map(|i| look(&g.pow(i))).collect::<Result<_>>()?;
        let reflections: Vec<u32> = if kind.has_reflection() {
            (0..n).map(|i| look(&h.then(&g.pow(i)))).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let mut word_of = HashMap::new();
        for (i, &r) in rotations.iter().enumerate() {
            word_of.insert(r, DihedralWord::Rotation(i));
        }
        for (i, &r) in reflections.iter().enumerate() {
            word_of.insert(r, DihedralWord::Reflection(i));
        }
        let units = s.units();
        let rest = (0..s.len() as u32).filter(|a| !word_of.contains_key(a)).collect();
        Ok(Self {
            s,
            kind,
            green: GreenData::compute(s),
            rotations,
            reflections,
            word_of,
            units,
            rest,
        })
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }

    fn g(&self) -> u32 {
        self.rotations[1]
    }

    fn h(&self) -> Option<u32> {
        self.reflections.first().copied()
    }

    /// Map given by one image for each unit word and one for the ideal
    /// `I_{n−1}`.
    fn unit_map(&self, rot: impl Fn(usize) -> u32, refl: impl Fn(usize) -> u32, ideal: u32) -> Endomorphism {
        let mut images = vec![ideal; self.s.len()];
        for (i, &r) in self.rotations.iter().enumerate() {
            images[r as usize] = rot(i);
        }
        for (i, &r) in self.reflections.iter().enumerate() {
            images[r as usize] = refl(i);
        }
        Endomorphism::untagged(images)
    }

    fn zero(&self) -> Result<u32> {
        self.s
            .zero()
            .ok_or_else(|| Error::Precondition(format!("{} has no empty map", self.kind)))
    }

    fn check_idempotent(&self, e: u32) -> Result<()> {
        if (e as usize) >= self.s.len() || !self.s.is_idempotent(e) {
            return Err(Error::NotIdempotent(e as usize));
        }
        Ok(())
    }

    // ---- constructors ----

    /// Type 1: `t ↦ σ⁻¹tσ` with `σ ∈ D_2n`.
    pub fn inner_auto(&self, sigma: DihedralWord) -> Result<Endomorphism> {
        let p = sigma.to_permutation(self.n());
        let (sp, si) = (p.to_transformation(), p.inverse().to_transformation());
        let images = self
            .s
            .elements()
            .iter()
            .map(|t| {
                self.s
                    .index_of(&si.then(t).then(&sp))
                    .ok_or_else(|| Error::Domain(format!("conjugate of {t} by {sigma} leaves S")))
            })
            .collect::<Result<_>>()?;
        Ok(Endomorphism {
            images,
            tag: Some(EndoType::T1 { sigma }),
        })
    }

    /// `φ₀` restricted to `S`.
    pub fn phi0(&self) -> Result<Endomorphism> {
        let images = self
            .s
            .elements()
            .iter()
            .map(|t| {
                self.s
                    .index_of(&phi0(t))
                    .ok_or_else(|| Error::Domain(format!("φ₀ sends {t} outside S")))
            })
            .collect::<Result<_>>()?;
        Ok(Endomorphism::untagged(images))
    }

    /// Type 2: `φ₀|_S` followed by conjugation by `σ_{x,k}`.
    pub fn phi_sigma(&self, sigma: SigmaXK) -> Result<Endomorphism> {
        if !self.kind.is_partial() {
            return Err(Error::Precondition(format!("type 2 needs a partial kind, got {}", self.kind)));
        }
        if sigma.n != self.n() {
            return Err(Error::Domain("σ acts on a different chain".into()));
        }
        let p = SigmaXK::new(sigma.n, sigma.x, sigma.k)?.to_permutation();
        let (sp, si) = (p.to_transformation(), p.inverse().to_transformation());
        let images = self
            .s
            .elements()
            .iter()
            .map(|t| {
                self.s
                    .index_of(&si.then(&phi0(t)).then(&sp))
                    .ok_or_else(|| Error::Domain(format!("φ_σ sends {t} outside S")))
            })
            .collect::<Result<_>>()?;
        Ok(Endomorphism {
            images,
            tag: Some(EndoType::T2 { sigma }),
        })
    }

    /// Type 3: units to `e`, everything else to `f`.
    pub fn type3(&self, e: u32, f: u32) -> Result<Endomorphism> {
        self.check_idempotent(e)?;
        self.check_idempotent(f)?;
        if e == f {
            return Err(Error::Precondition("type 3 needs e != f".into()));
        }
        if self.s.mul(e, f) != f || self.s.mul(f, e) != f {
            return Err(Error::Precondition("type 3 needs ef = fe = f".into()));
        }
        let mut m = self.unit_map(|_| e, |_| e, f);
        m.tag = Some(EndoType::T3 { e, f });
        Ok(m)
    }

    /// Checks that `a` is a group element of order `p`, `p | n`, `p > 1`.
    fn group_order_dividing_n(&self, a: u32, what: &str) -> Result<usize> {
        let p = element_order(self.s, a)
            .ok_or_else(|| Error::Precondition(format!("{what} is not a group element")))?;
        if p <= 1 || self.n() % p != 0 {
            return Err(Error::Precondition(format!("{what} has order {p}, need p | n and p > 1")));
        }
        Ok(p)
    }

    /// Type 4: `g^i ↦ g₀^{i+p}`, `I_{n−1} ↦ ∅`.
    pub fn type4(&self, g0: u32) -> Result<Endomorphism> {
        if !matches!(self.kind, SemigroupKind::POPI | SemigroupKind::POP) {
            return Err(Error::Precondition(format!("type 4 is not defined on {}", self.kind)));
        }
        let p = self.group_order_dividing_n(g0, "g0")?;
        let zero = self.zero()?;
        let mut m = self.unit_map(|i| self.s.pow(g0, i + p), |_| unreachable!(), zero);
        m.tag = Some(EndoType::T4 { g0, p });
        Ok(m)
    }

    /// Type 5: `g^i ↦ g₀^{i+p}`, `hg^i ↦ h₀g₀^{i+p}`, `I_{n−1} ↦ ∅`.
    pub fn type5(&self, g0: u32, h0: u32) -> Result<Endomorphism> {
        if !matches!(self.kind, SemigroupKind::PORI | SemigroupKind::POR) {
            return Err(Error::Precondition(format!("type 5 is not defined on {}", self.kind)));
        }
        let p = self.group_order_dividing_n(g0, "g0")?;
        if element_order(self.s, h0) != Some(2) {
            return Err(Error::Precondition("h0 must be a group element of order 2".into()));
        }
        if !self.green.h_related(g0, h0) {
            return Err(Error::Precondition("g0 and h0 must lie in one maximal subgroup".into()));
        }
        let s = self.s;
        let cyclic: Vec<u32> = (1..=p).map(|m| s.pow(g0, m)).collect();
        if cyclic.contains(&h0) || s.mul(g0, h0) != s.mul(h0, s.pow(g0, 2 * p - 1)) {
            return Err(Error::Precondition(format!("⟨g0, h0⟩ is not dihedral of order {}", 2 * p)));
        }
        let zero = self.zero()?;
        let mut m = self.unit_map(|i| s.pow(g0, i + p), |i| s.mul(h0, s.pow(g0, i + p)), zero);
        m.tag = Some(EndoType::T5 { g0, h0, p });
        Ok(m)
    }

    /// Type 6: the unit group onto `{h₀², h₀}` in one of three ways,
    /// `I_{n−1} ↦ f`.
    pub fn type6(&self, h0: u32, f: u32, variant: T6Variant) -> Result<Endomorphism> {
        if !self.kind.has_reflection() {
            return Err(Error::Precondition(format!("type 6 is not defined on {}", self.kind)));
        }
        if element_order(self.s, h0) != Some(2) {
            return Err(Error::Precondition("h0 must be a group element of order 2".into()));
        }
        self.check_idempotent(f)?;
        if self.s.rank(f) > 2 {
            return Err(Error::Precondition("f must have rank at most 2".into()));
        }
        if self.s.mul(h0, f) != f || self.s.mul(f, h0) != f {
            return Err(Error::Precondition("type 6 needs h0 f = f h0 = f".into()));
        }
        if variant != T6Variant::A && self.n() % 2 != 0 {
            return Err(Error::Precondition("type 6 variants b and c need n even".into()));
        }
        let s = self.s;
        let pw = |m: usize| s.pow(h0, m);
        let mut m = match variant {
            T6Variant::A => self.unit_map(|_| pw(2), |_| h0, f),
            T6Variant::B => self.unit_map(|i| pw(i + 2), |i| pw(i + 2), f),
            T6Variant::C => self.unit_map(|i| pw(i + 2), |i| pw(i + 1), f),
        };
        m.tag = Some(EndoType::T6 { h0, f, variant });
        Ok(m)
    }

    /// Type 7: the constant map onto an idempotent.
    pub fn type7(&self, e: u32) -> Result<Endomorphism> {
        self.check_idempotent(e)?;
        Ok(Endomorphism {
            images: vec![e; self.s.len()],
            tag: Some(EndoType::T7 { e }),
        })
    }

    // ---- parameter sweeps ----

    pub fn all_type1(&self) -> Vec<Endomorphism> {
        dihedral_words(self.n())
            .into_iter()
            .map(|w| self.inner_auto(w).expect("D_2n normalizes each oriented kind"))
            .collect()
    }

    pub fn all_type2(&self) -> Vec<Endomorphism> {
        if !self.kind.is_partial() {
            return Vec::new();
        }
        sigma_family(self.n())
            .into_iter()
            .map(|s| self.phi_sigma(s).expect("N_n normalizes the partial kinds"))
            .collect()
    }

    fn idempotent_pairs(&self) -> Vec<(u32, u32)> {
        let es = self.s.idempotents();
        let mut out = Vec::new();
        for &e in &es {
            for &f in &es {
                if e != f && self.s.mul(e, f) == f && self.s.mul(f, e) == f {
                    out.push((e, f));
                }
            }
        }
        out
    }

    pub fn all_type3(&self) -> Vec<Endomorphism> {
        self.idempotent_pairs()
            .into_iter()
            .map(|(e, f)| self.type3(e, f).expect("checked parameters"))
            .collect()
    }

    fn group_elements_of_order(&self, pred: impl Fn(usize) -> bool) -> Vec<(u32, usize)> {
        (0..self.s.len() as u32)
            .filter_map(|a| element_order(self.s, a).map(|o| (a, o)))
            .filter(|&(_, o)| pred(o))
            .collect()
    }

    pub fn all_type4(&self) -> Vec<Endomorphism> {
        if !matches!(self.kind, SemigroupKind::POPI | SemigroupKind::POP) {
            return Vec::new();
        }
        let n = self.n();
        self.group_elements_of_order(|o| o > 1 && n % o == 0)
            .into_iter()
            .map(|(g0, _)| self.type4(g0).expect("checked parameters"))
            .collect()
    }

    pub fn all_type5(&self) -> Vec<Endomorphism> {
        if !matches!(self.kind, SemigroupKind::PORI | SemigroupKind::POR) {
            return Vec::new();
        }
        let n = self.n();
        let gs = self.group_elements_of_order(|o| o > 1 && n % o == 0);
        let mut out = Vec::new();
        for (g0, _) in gs {
            for &h0 in self.green.h_class_of(g0) {
                if let Ok(m) = self.type5(g0, h0) {
                    out.push(m);
                }
            }
        }
        out
    }

    pub fn all_type6(&self) -> Vec<Endomorphism> {
        if !self.kind.has_reflection() {
            return Vec::new();
        }
        let variants: &[T6Variant] = if self.n() % 2 == 0 {
            &[T6Variant::A, T6Variant::B, T6Variant::C]
        } else {
            &[T6Variant::A]
        };
        let fs: Vec<u32> = self.s.idempotents().into_iter().filter(|&f| self.s.rank(f) <= 2).collect();
        let mut out = Vec::new();
        for (h0, _) in self.group_elements_of_order(|o| o == 2) {
            for &f in &fs {
                if self.s.mul(h0, f) == f && self.s.mul(f, h0) == f {
                    for &v in variants {
                        out.push(self.type6(h0, f, v).expect("checked parameters"));
                    }
                }
            }
        }
        out
    }

    pub fn all_type7(&self) -> Vec<Endomorphism> {
        self.s
            .idempotents()
            .into_iter()
            .map(|e| self.type7(e).expect("idempotent"))
            .collect()
    }

    /// Every constructor output for every valid parameter, with
    /// multiplicity, ordered by type.
    pub fn all_constructed(&self) -> Vec<Endomorphism> {
        [
            self.all_type1(),
            self.all_type2(),
            self.all_type3(),
            self.all_type4(),
            self.all_type5(),
            self.all_type6(),
            self.all_type7(),
        ]
        .concat()
    }

    /// Constructor outputs counted per type number.
    pub fn constructed_counts(&self) -> BTreeMap<u8, usize> {
        let mut counts = BTreeMap::new();
        for m in self.all_constructed() {
            *counts.entry(m.tag.expect("constructors tag their output").number()).or_insert(0) += 1;
        }
        counts
    }

    // ---- checks ----

    pub fn is_endomorphism(&self, images: &[u32]) -> bool {
        is_endomorphism(self.s, images)
    }

    /// Every endomorphism, found by the generator search.
    pub fn enumerate(&self, budget: Option<Duration>) -> Result<Vec<Endomorphism>> {
        Ok(search_endomorphisms(self.s, self.s.generators(), budget)?
            .into_iter()
            .map(Endomorphism::untagged)
            .collect())
    }

    /// Decides the type of an endomorphism structurally, then certifies the
    /// answer by rebuilding the map from the recovered parameters.
    pub fn classify(&self, phi: &Endomorphism) -> Result<EndoType> {
        let img = &phi.images;
        if img.len() != self.s.len() {
            return Err(Error::Domain("image array has the wrong length".into()));
        }
        let unclassifiable = |why: &str| Error::Unclassifiable(format!("{why}: {img:?}"));
        let candidate = self.propose(phi).ok_or_else(|| unclassifiable("no family fits"))?;
        let rebuilt = self.construct(candidate).map_err(|e| unclassifiable(&e.to_string()))?;
        if rebuilt.images != *img {
            return Err(unclassifiable("reconstruction differs"));
        }
        Ok(candidate)
    }

    fn propose(&self, phi: &Endomorphism) -> Option<EndoType> {
        let img = &phi.images;
        let s = self.s;
        if phi.is_constant() {
            return Some(EndoType::T7 { e: img[0] });
        }
        if phi.is_bijective() {
            let g_image = img[self.g() as usize];
            return dihedral_words(self.n())
                .into_iter()
                .find(|&w| {
                    let p = w.to_permutation(self.n());
                    let conj = make_g(self.n()).conjugate_by(&p).to_transformation();
                    s.index_of(&conj) == Some(g_image)
                        && self.inner_auto(w).map(|m| m.images == *img).unwrap_or(false)
                })
                .map(|sigma| EndoType::T1 { sigma });
        }
        let n = self.n();
        let unit_images: BTreeSet<u32> = self.units.iter().map(|&u| img[u as usize]).collect();
        let rest_images: BTreeSet<u32> = self.rest.iter().map(|&r| img[r as usize]).collect();
        if rest_images.len() > 1 {
            // only type 2 separates points below the units without being bijective
            let units_onto_units =
                unit_images.iter().all(|&v| s.rank(v) == n) && unit_images.len() == self.units.len();
            if !units_onto_units || !self.kind.is_partial() {
                return None;
            }
            return sigma_family(n)
                .into_iter()
                .find(|&sg| self.phi_sigma(sg).map(|m| m.images == *img).unwrap_or(false))
                .map(|sigma| EndoType::T2 { sigma });
        }
        let f = *rest_images.iter().next().unwrap();
        let g_image = img[self.g() as usize];
        match unit_images.len() {
            1 => Some(EndoType::T3 { e: g_image, f }),
            2 if self.kind.has_reflection() => {
                let h_image = img[self.h()? as usize];
                let h0 = *unit_images.iter().find(|&&v| !s.is_idempotent(v))?;
                let variant = match (g_image == h0, h_image == h0) {
                    (false, true) => T6Variant::A,
                    (true, false) => T6Variant::B,
                    (true, true) => T6Variant::C,
                    (false, false) => return None,
                };
                Some(EndoType::T6 { h0, f, variant })
            }
            _ => {
                let p = element_order(s, g_image)?;
                match self.h() {
                    None => Some(EndoType::T4 { g0: g_image, p }),
                    Some(h) => Some(EndoType::T5 {
                        g0: g_image,
                        h0: img[h as usize],
                        p,
                    }),
                }
            }
        }
    }

    /// Builds the endomorphism named by a tag.
    pub fn construct(&self, t: EndoType) -> Result<Endomorphism> {
        match t {
            EndoType::T1 { sigma } => self.inner_auto(sigma),
            EndoType::T2 { sigma } => self.phi_sigma(sigma),
            EndoType::T3 { e, f } => self.type3(e, f),
            EndoType::T4 { g0, p } => {
                let m = self.type4(g0)?;
                check_p(m, p)
            }
            EndoType::T5 { g0, h0, p } => {
                let m = self.type5(g0, h0)?;
                check_p(m, p)
            }
            EndoType::T6 { h0, f, variant } => self.type6(h0, f, variant),
            EndoType::T7 { e } => self.type7(e),
        }
    }

    /// Kernel of `φ` as universal or `ρ^{J_k}_π`.
    pub fn kernel_shape(&self, phi: &Endomorphism) -> Result<KernelShape> {
        kernel_shape(self.s, &self.green, &phi.images)
    }

    /// Type-number word of a unit: `g^i` or `hg^i`.
    pub fn unit_word(&self, a: u32) -> Option<DihedralWord> {
        self.word_of.get(&a).copied()
    }
}

fn check_p(m: Endomorphism, p: usize) -> Result<Endomorphism> {
    match m.tag {
        Some(EndoType::T4 { p: q, .. }) | Some(EndoType::T5 { p: q, .. }) if q == p => Ok(m),
        _ => Err(Error::Precondition(format!("order parameter {p} does not match g0"))),
    }
}

/// `images[a·b] = images[a]·images[b]` for all pairs.
pub fn is_endomorphism(s: &FiniteSemigroup, images: &[u32]) -> bool {
    let m = s.len();
    if images.len() != m || images.iter().any(|&v| v as usize >= m) {
        return false;
    }
    (0..m as u32).all(|a| {
        (0..m as u32).all(|b| images[s.mul(a, b) as usize] == s.mul(images[a as usize], images[b as usize]))
    })
}

/// Kernel classification against the congruences `ρ^{J_k}_π` and the
/// universal congruence.
pub fn kernel_shape(s: &FiniteSemigroup, green: &GreenData, images: &[u32]) -> Result<KernelShape> {
    let mut classes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (a, &v) in images.iter().enumerate() {
        classes.entry(v).or_default().push(a as u32);
    }
    if classes.len() == 1 {
        return Ok(KernelShape::Universal);
    }
    let n = s.n();
    let min_rank = (0..s.len() as u32).map(|a| s.rank(a)).min().unwrap_or(0);
    let top_merged = classes
        .values()
        .filter(|c| c.len() > 1)
        .flat_map(|c| c.iter().map(|&a| s.rank(a)))
        .max();
    let tries: Vec<usize> = match top_merged {
        None => vec![1.max(min_rank)],
        Some(k0) => [k0, k0 + 1].into_iter().filter(|&k| k <= n).collect(),
    };
    for k in tries {
        if let Some(shape) = rho_shape(s, green, &classes, k) {
            return Ok(shape);
        }
    }
    Err(Error::KernelShape(format!("kernel {:?} is not of the form ρ^J_π", classes.values().collect::<Vec<_>>())))
}

fn rho_shape(
    s: &FiniteSemigroup,
    green: &GreenData,
    classes: &BTreeMap<u32, Vec<u32>>,
    k: usize,
) -> Option<KernelShape> {
    let mut ideal_class: Option<&Vec<u32>> = None;
    let mut any_merge = false;
    let mut all_full_h = true;
    for c in classes.values() {
        let ranks: BTreeSet<usize> = c.iter().map(|&a| s.rank(a)).collect();
        let lowest = *ranks.iter().next().unwrap();
        if lowest < k {
            // the ideal below J_k must be exactly one class
            if ranks.iter().any(|&r| r >= k) || ideal_class.is_some() {
                return None;
            }
            ideal_class = Some(c);
            continue;
        }
        if c.len() > 1 {
            if lowest > k || ranks.len() > 1 {
                return None;
            }
            if !c.iter().all(|&a| green.h_related(a, c[0])) {
                return None;
            }
            any_merge = true;
        }
        if lowest == k && c.len() != green.h_class_of(c[0]).len() {
            all_full_h = false;
        }
    }
    let ideal_size = (0..s.len() as u32).filter(|&a| s.rank(a) < k).count();
    if ideal_size > 0 && ideal_class.map(Vec::len) != Some(ideal_size) {
        return None;
    }
    let pi = if !any_merge {
        PiShape::Identity
    } else if all_full_h {
        PiShape::Universal
    } else {
        PiShape::Proper
    };
    Some(KernelShape::Rho {
        k,
        collapses_ideal: ideal_size > 0,
        within_h_only: true,
        pi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use SemigroupKind::*;

    fn s(kind: SemigroupKind, n: usize) -> FiniteSemigroup {
        FiniteSemigroup::build(kind, n).unwrap()
    }

    #[test]
    fn phi0_examples() {
        let t = PartialTransformation::new(4, &[Some(1), Some(3), Some(4), None]).unwrap();
        assert_eq!(phi0(&t).entries(), vec![None, None, None, Some(2)]);
        let t = PartialTransformation::full(&[1, 1, 2, 4]).unwrap();
        assert_eq!(phi0(&t).entries(), vec![Some(3), Some(3), None, None]);
        let t = PartialTransformation::full(&[1, 1, 2, 2]).unwrap();
        assert_eq!(phi0(&t), PartialTransformation::empty(4));
        let g = PartialTransformation::full(&[2, 3, 4, 1]).unwrap();
        assert_eq!(phi0(&g), g);
    }

    #[test]
    fn inner_autos_are_distinct() {
        for n in 3..=4 {
            for kind in SemigroupKind::TARGETS {
                let sg = s(kind, n);
                let ctx = EndoContext::new(&sg).unwrap();
                let autos: BTreeSet<_> = ctx.all_type1().into_iter().collect();
                assert_eq!(autos.len(), 2 * n);
                assert_eq!(ctx.inner_auto(DihedralWord::Rotation(0)).unwrap().images, (0..sg.len() as u32).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn conjugating_g_by_h() {
        let sg = s(OP, 3);
        let ctx = EndoContext::new(&sg).unwrap();
        let m = ctx.inner_auto(DihedralWord::Reflection(0)).unwrap();
        assert_eq!(m.images[ctx.rotations[1] as usize], ctx.rotations[2]);
    }

    #[test]
    fn type2_examples() {
        let sg = s(POPI, 3);
        let ctx = EndoContext::new(&sg).unwrap();
        let t2: BTreeSet<_> = ctx.all_type2().into_iter().collect();
        assert_eq!(t2.len(), 6);
        let id = SigmaXK::new(3, 1, 1).unwrap();
        assert_eq!(ctx.phi_sigma(id).unwrap().images, ctx.phi0().unwrap().images);
        let op = s(OP, 3);
        assert!(EndoContext::new(&op).unwrap().phi_sigma(id).is_err());
    }

    #[test]
    fn precondition_errors() {
        let sg = s(PORI, 3);
        let ctx = EndoContext::new(&sg).unwrap();
        let e = sg.identity().unwrap();
        assert!(ctx.type3(e, e).is_err());
        let h = ctx.reflections[0];
        let zero = sg.zero().unwrap();
        assert!(ctx.type6(h, zero, T6Variant::B).is_err());
        assert!(ctx.type6(h, zero, T6Variant::A).is_ok());
        assert!(ctx.type4(ctx.rotations[1]).is_err());
        assert!(ctx.type7(ctx.rotations[1]).is_err());
    }

    #[test]
    fn type6a_on_pori3() {
        let sg = s(PORI, 3);
        let ctx = EndoContext::new(&sg).unwrap();
        let h = ctx.reflections[0];
        let m = ctx.type6(h, sg.zero().unwrap(), T6Variant::A).unwrap();
        let one = sg.identity().unwrap();
        for &r in &ctx.rotations {
            assert_eq!(m.images[r as usize], one);
        }
        for &r in &ctx.reflections {
            assert_eq!(m.images[r as usize], h);
        }
        assert!(ctx.is_endomorphism(&m.images));
    }

    #[test]
    fn type4_on_popi4() {
        let sg = s(POPI, 4);
        let ctx = EndoContext::new(&sg).unwrap();
        let g2 = ctx.rotations[2];
        let m = ctx.type4(g2).unwrap();
        for i in 0..4 {
            assert_eq!(m.images[ctx.rotations[i] as usize], ctx.rotations[(2 * i) % 4]);
        }
        assert!(ctx.is_endomorphism(&m.images));
    }

    #[test]
    fn constructed_maps_are_endomorphisms() {
        for kind in SemigroupKind::TARGETS {
            let sg = s(kind, 3);
            let ctx = EndoContext::new(&sg).unwrap();
            for m in ctx.all_constructed() {
                assert!(ctx.is_endomorphism(&m.images), "{kind} {:?}", m.tag);
                assert_eq!(ctx.classify(&m).unwrap(), m.tag.unwrap());
            }
        }
    }

    #[test]
    fn swapping_images_breaks_homomorphism() {
        let sg = s(OP, 3);
        let ctx = EndoContext::new(&sg).unwrap();
        let mut m = ctx.inner_auto(DihedralWord::Rotation(0)).unwrap().images;
        let (a, b) = (0..sg.len() as u32)
            .flat_map(|a| (0..sg.len() as u32).map(move |b| (a, b)))
            .find(|&(a, b)| !ctx.green.h_related(a, b))
            .unwrap();
        m.swap(a as usize, b as usize);
        assert!(!ctx.is_endomorphism(&m));
    }

    #[test]
    fn kernel_shapes_of_constructions() {
        let sg = s(POP, 3);
        let ctx = EndoContext::new(&sg).unwrap();
        let id = ctx.inner_auto(DihedralWord::Rotation(0)).unwrap();
        assert!(matches!(ctx.kernel_shape(&id).unwrap(), KernelShape::Rho { k: 1, pi: PiShape::Identity, .. }));
        let p0 = ctx.phi0().unwrap();
        assert!(matches!(ctx.kernel_shape(&p0).unwrap(), KernelShape::Rho { k: 2, pi: PiShape::Universal, .. }));
        let c = ctx.type7(sg.zero().unwrap()).unwrap();
        assert_eq!(ctx.kernel_shape(&c).unwrap(), KernelShape::Universal);
    }

    #[test]
    fn context_rejects_auxiliary_kinds() {
        let sg = s(T, 3);
        assert!(EndoContext::new(&sg).is_err());
    }
}
