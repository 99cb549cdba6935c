//! Chain complexes for the commutator subgroup of the pure braid group.
//!
//! The crate builds the Salvetti complex `Ch(n)` of the braid arrangement,
//! its cover `Ch^log(n)` with Laurent coefficients, the subcomplex
//! `t̃Ch^log(n)` and the subset complexes `Ch^{log,S}`, reduces the filtered
//! complex `t̃Ch^log(n)` by an explicit discrete Morse matching, and computes
//! ranks over fraction fields by evaluation at random points modulo a large
//! prime.

pub mod braid;
pub mod cli;
pub mod complex;
pub mod error;
pub mod laurent;
pub mod modp;
pub mod morse;
pub mod partitions;
pub mod spectral;

pub use error::{Error, Result};
