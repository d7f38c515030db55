//! Reference computations for the test suites.
//!
//! Nothing here shares code with the `cointegrate` library. Every routine is
//! written from the textbook formula (normal equations, explicit moment
//! matrices, brute-force simulation) and carries its arithmetic in
//! double-double precision where cancellation matters, so that agreement with
//! the library's QR/Cholesky paths is a meaningful check.

#![allow(clippy::needless_range_loop)]

pub mod adf;
pub mod dd;
pub mod irf;
pub mod johansen;
pub mod ols;

pub use dd::Dd;
