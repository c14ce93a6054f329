//! Exact-arithmetic engine for wall-crossing of curve-counting series.
//!
//! The crate works over the numerical lattice `Z ⊕ Z^k ⊕ Z` of triples
//! (degree, curve class, rank), truncated monoid-algebra series with
//! arbitrary-precision rational coefficients, and weak central charges
//! whose phase comparisons are decided by exact sign computations. On
//! top of these it implements the combinatorial transformation
//! coefficients that govern how counting invariants change across walls
//! in the space of stability conditions, and the product formulas that
//! transport generating series along paths between chambers.
//!
//! All arithmetic is exact; no operation introduces rounding. Every
//! binary operation allocates a fresh value, so values are safe to share
//! across threads.

pub mod error;
pub mod lattice;
pub mod series;
pub mod stability;
pub mod toycat;
pub mod wallcross;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
