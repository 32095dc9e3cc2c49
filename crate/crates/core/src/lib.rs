//! Analysis of linear-programming decoding for binary linear codes.
//!
//! Builds the fundamental polytope and cone of a parity-check matrix,
//! enumerates cone generators to obtain pseudo-weight spectra, computes
//! relaxation lower bounds and search-based upper bounds on the minimum
//! AWGN pseudo-weight, and simulates LP decoding against an ML oracle.

pub mod bounds;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod generators;
pub mod linprog;
pub mod polytope;
pub mod report;

pub use error::{Error, Result};
