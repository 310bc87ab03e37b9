//! Quasi-energy spectra of nonlinear resonances, recurrence time scales, and
//! wave-packet and classical dynamics in a phase-modulated optical lattice.

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classical;
pub mod config;
pub mod error;
pub mod mathieu;
pub mod quantum;
pub mod recipes;
pub mod spectrum;
pub mod times;
pub mod validation;

pub use error::{Error, Result};

/// Library version, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
