//! Nodal structure of few-electron atomic wave functions and fixed-node
//! quantum Monte Carlo.
//!
//! Atomic units throughout (hartree, bohr); the nucleus is clamped at the
//! origin.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod configuration;
pub mod error;
pub mod nodal;
pub mod nodeopt;
pub mod qmc;
pub mod topology;
pub mod wavefunction;

pub use error::{Error, Result};
