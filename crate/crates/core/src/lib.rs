//! Finite set mappings `f : [n]^k → P(n)` and their free sets, the interval
//! and enumeration constructions, finite forcing conditions with their
//! amalgamations, and an exact checker for partition arrows.

pub mod constructions;
pub mod error;
pub mod forcing;
pub mod mapping;
pub mod predicates;
pub mod ramsey;
pub mod search;
pub mod set;

pub use error::{Error, Result};
pub use mapping::{Flags, SetMapping};
pub use search::{enumerate_free_sets, max_free_set, oracle_max_free_set, SearchConfig, SearchReport};
pub use set::{ElementSet, GroundSet};
