use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::PartialTransformation;
use crate::error::{Error, Result};

/// The monoids of partial transformations handled by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemigroupKind {
    OP,
    POPI,
    POP,
    OR,
    PORI,
    POR,
    O,
    POI,
    PO,
    C,
    D2,
    T,
    I,
    PT,
}

use SemigroupKind::*;

impl SemigroupKind {
    pub const ALL: [SemigroupKind; 14] = [OP, POPI, POP, OR, PORI, POR, O, POI, PO, C, D2, T, I, PT];

    /// The six monoids whose endomorphisms are classified.
    pub const TARGETS: [SemigroupKind; 6] = [OP, POPI, POP, OR, PORI, POR];

    pub fn tag(self) -> &'static str {
        match self {
            OP => "op",
            POPI => "popi",
            POP => "pop",
            OR => "or",
            PORI => "pori",
            POR => "por",
            O => "o",
            POI => "poi",
            PO => "po",
            C => "c",
            D2 => "d2",
            T => "t",
            I => "i",
            PT => "pt",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag().eq_ignore_ascii_case(tag))
            .ok_or_else(|| Error::Unsupported(format!("unknown kind {tag:?}")))
    }

    pub fn is_target(self) -> bool {
        Self::TARGETS.contains(&self)
    }

    /// Members may have a proper domain.
    pub fn is_partial(self) -> bool {
        matches!(self, POPI | POP | PORI | POR | POI | PO | I | PT)
    }

    /// Members are partial permutations.
    pub fn is_injective(self) -> bool {
        matches!(self, POPI | PORI | POI | I | C | D2)
    }

    /// The group of units contains `h`.
    pub fn has_reflection(self) -> bool {
        matches!(self, OR | PORI | POR | D2)
    }

    /// Members are permutations.
    pub fn is_group(self) -> bool {
        matches!(self, C | D2)
    }

    pub(crate) fn orientation(self) -> Orientation {
        match self {
            OP | POPI | POP | C => Orientation::Preserving,
            OR | PORI | POR | D2 => Orientation::Oriented,
            O | POI | PO => Orientation::OrderPreserving,
            T | I | PT => Orientation::Any,
        }
    }

    /// Membership predicate.
    pub fn contains(self, t: &PartialTransformation) -> bool {
        if !self.is_partial() && !t.is_full() {
            return false;
        }
        if self.is_injective() && !t.is_injective() {
            return false;
        }
        if self.is_group() && !t.is_permutation() {
            return false;
        }
        match self.orientation() {
            Orientation::Preserving => t.is_orientation_preserving(),
            Orientation::Oriented => t.is_oriented(),
            Orientation::OrderPreserving => t.classify_orientation().order_preserving,
            Orientation::Any => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Orientation {
    Preserving,
    Oriented,
    OrderPreserving,
    Any,
}

impl fmt::Display for SemigroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SemigroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_tag(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for k in SemigroupKind::ALL {
            assert_eq!(SemigroupKind::from_tag(k.tag()).unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.tag()));
        }
        assert_eq!("PORI".parse::<SemigroupKind>().unwrap(), PORI);
        assert!(SemigroupKind::from_tag("od").is_err());
    }

    #[test]
    fn membership_of_g_and_h() {
        let g = PartialTransformation::full(&[2, 3, 4, 1]).unwrap();
        let h = PartialTransformation::full(&[4, 3, 2, 1]).unwrap();
        assert!(OP.contains(&g) && C.contains(&g) && !O.contains(&g));
        assert!(!OP.contains(&h) && OR.contains(&h) && D2.contains(&h) && !C.contains(&h));
        let e = PartialTransformation::empty(4);
        assert!(POPI.contains(&e) && !OP.contains(&e) && !OR.contains(&e));
    }
}
