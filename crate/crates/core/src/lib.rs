//! Cointegration analysis for monthly macroeconomic series.
//!
//! The pipeline runs from aligned data ([`frame`]) through unit-root tests
//! ([`unit_root`]), VAR lag selection ([`var_select`]), the Johansen trace
//! test ([`johansen`]), rank-restricted VECM estimation ([`vecm`]) and
//! orthogonalized impulse responses with bootstrap bands ([`irf`]).
//! [`data_io`] reads FRED-style CSV snapshots and simulates cointegrated
//! systems for testing.

pub mod data_io;
pub mod error;
pub mod frame;
pub mod irf;
pub mod johansen;
mod linalg;
pub mod matrix_serde;
pub mod regress;
pub mod unit_root;
pub mod var_select;
pub mod vecm;

pub use error::{Error, Result};
pub use frame::{align, describe, diff, lag_matrix, AlignPolicy, DescribeRow, Frame, Period, Series};
