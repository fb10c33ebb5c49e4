//! Query-answer causality through database repairs.
//!
//! Given an instance, denial constraints and queries, this crate computes
//! tuple-deletion repairs and null-update repairs, derives actual causes,
//! contingency sets and exact responsibilities from them, and emits the
//! corresponding answer-set repair programs in DLV syntax.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod asp;
pub mod hitting;
pub mod null_causes;
pub mod null_repairs;
pub mod qlang;
pub mod relmodel;
pub mod tuple_causes;
pub mod tuple_repairs;

mod error;

pub use error::Error;
pub use num_rational::Ratio;

/// Exact responsibility values.
pub type Rational = Ratio<u64>;
