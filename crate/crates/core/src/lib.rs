//! Partial-secular Liouvillians for quadratic open quantum systems and the
//! block structure induced by the number superoperator.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: excitation bases, ladder operators and the operator/vector
//!   isomorphism used to write superoperators as matrices.
//! - [`quadratic`]: mapping of spin models onto free fermions (two coupled
//!   spins, excitation-preserving chains).
//! - [`redfield`]: jump-operator decomposition, a thermal Ohmic rate model,
//!   partial secular pair selection and Liouvillian assembly.
//! - [`blocks`]: number and parity superoperators, block decomposition,
//!   block spectra, steady states and block-wise propagation.
//! - [`gaussian`]: second-moment dynamics of bosonic Gaussian states.
//! - [`random`]: random number-graded instances for property testing.
//!
//! Units are `ħ = k_B = 1` throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod quadratic;
pub mod random;
pub mod redfield;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Crate version embedded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
