//! Quantum renormalization group analysis of l1-norm coherence for the
//! 5-site blocks of the 2D anisotropic XY and transverse-field Ising models.
//!
//! - [`spinops`]: Pauli strings, states, density matrices, partial traces.
//! - [`groundstate`]: dense eigensolver and symmetry-resolved ground states.
//! - [`xy`], [`ising`]: block Hamiltonians and coupling recursions.
//! - [`coherence`]: the l1-norm quantifier.
//! - [`analysis`]: sweeps, derivative peaks and scaling fits.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod coherence;
pub mod error;
pub mod groundstate;
pub mod ising;
pub mod spinops;
pub mod xy;

pub use error::{Error, Result};
