//! Numerical model of degenerate spontaneous four-wave mixing in integrated
//! waveguides and microrings pumped by two CW lines.
//!
//! Frequencies are angular frequencies in rad/s and lengths are in metres.
//! Wavelengths only appear at the boundary ([`spectral::make_grid`],
//! [`spectral::PumpLine`], [`spectral::FilterSpec`]).

// Negated comparisons double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod fringes;
pub mod jsa;
pub mod schmidt;
pub mod spectral;
pub mod squeezing;

pub use error::{Error, Result};
