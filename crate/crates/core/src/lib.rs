//! Oriented transformation monoids on a finite chain.
//!
//! The crate builds `OP_n`, `POPI_n`, `POP_n`, `OR_n`, `PORI_n` and `POR_n`
//! (plus a few auxiliary monoids) as explicit Cayley tables, enumerates and
//! classifies their endomorphisms, and evaluates the closed-form counts.

pub mod chain;
pub mod counting;
pub mod endo;
pub mod error;
pub mod groups;
pub mod semigroup;
pub mod verify;

pub use chain::{OrientationClass, PartialTransformation};
pub use error::{Error, Result};
pub use semigroup::{FiniteSemigroup, GreenData, SemigroupKind};
