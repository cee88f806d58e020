//! Certification of genuine multipartite entanglement (GME) for finite
//! dimensional quantum states.
//!
//! States are expanded in the tensor-product Weyl operator basis. The
//! resulting correlation tensors are flattened across bipartitions into block
//! matrices whose trace norms are compared against closed-form separability
//! bounds. A state whose smallest trace norm over all bipartitions exceeds the
//! largest bound is certified GME.
//!
//! Module map:
//!
//! - [`weyl`]: Weyl operators `A_ij` for arbitrary local dimension.
//! - [`states`]: density matrices, named kets, white-noise mixtures, partial
//!   traces and seeded random sampling.
//! - [`bloch`]: correlation-tensor decomposition and its inverse.
//! - [`criteria`]: block matrices, trace norms, bounds and verdicts.
//! - [`scan`]: noise-threshold scans over one-parameter state families.
//! - [`selftest`]: seeded oracle battery behind `gme-detect selftest`.

pub mod bloch;
pub mod criteria;
mod error;
pub mod scan;
pub mod selftest;
pub mod states;
pub mod weyl;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<C64>;
