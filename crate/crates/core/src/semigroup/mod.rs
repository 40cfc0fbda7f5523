//! Enumerated transformation monoids and their Green's structure.

mod enumerate;
mod finite;
mod green;
mod kind;

pub use enumerate::{
    elements_by_predicate, idempotent_counts_by_rank, idempotents_by_predicate, partial_identities,
    MAX_ENUMERATED, MAX_ENUM_N,
};
pub use finite::{closure, generator_set, read_cayley, FiniteSemigroup, MAX_CLOSURE, MAX_TABLE_ENTRIES};
pub use green::{
    element_order, find_idempotent_family, group_h_class, ideal, idempotent_power, idempotents_of_rank,
    index_and_period, j_class, FamilyMode, GreenData, GroupHClass, GroupStructure,
};
pub use kind::SemigroupKind;
