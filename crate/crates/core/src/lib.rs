//! Product-one (zero-sum) invariants of small finite groups.
//!
//! The crate builds groups as multiplication tables ([`group`]), computes
//! product sets of sequences exactly ([`seq`]), searches for the extremal
//! invariants `d(G)`, `s_L(G)` and `D_k(G)` ([`invariants`]), and extracts
//! product-one subsequences with explicit witnesses for the metacyclic groups
//! `C_m ⋉ C_{mn}` ([`extract`]). [`harness`] holds the reproducible
//! experiment plumbing shared by the CLI and the acceptance suite.

mod error;
pub mod extract;
pub mod group;
pub mod harness;
pub mod invariants;
pub mod numtheory;
pub mod seq;

pub use error::{Error, Result};
pub use group::{Elem, FiniteGroup, Homomorphism, Structure, Subgroup};
pub use seq::{LengthSet, Sequence, Witness};
