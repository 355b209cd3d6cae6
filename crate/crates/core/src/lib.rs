//! Exact cup-length, zero-divisors-cup-length and generating-series
//! rationality for finite-dimensional graded-commutative algebras.

pub mod cli;
pub mod exactla;
pub mod exactnum;
pub mod galg;
pub mod invariants;
pub mod series;
