//! Representations of integers as sums of terms `r * b^e`, with `r` drawn from
//! a finite coefficient set and `b` from a finite base set.
//!
//! The crate computes minimal representation lengths and the threshold
//! function `f_R(k)` by level-set search, builds explicit greedy and
//! coin-problem representations, and produces residue-class certificates of
//! non-representability from moduli with small Carmichael function.

mod bitset;
pub mod cover;
pub mod error;
pub mod greedy;
pub mod lambda;
pub mod numeric;
pub mod search;
pub mod terms;
mod wire;

pub use error::{Error, Result};

pub use terms::{CoefficientSet, Instance, PowerBasis, Representation, Term};
