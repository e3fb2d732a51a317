//! Numerical engine for four-dimensional fuzzy spectral triples and their
//! Yang-Mills-Higgs extensions.
//!
//! Matrices are dense `nalgebra` complex matrices. Operators on a matrix
//! space `M_m` are [`superop::SuperOp`]s acting on column-stacked matrices,
//! and operators on `V ⊗ M_m` are plain `4m² × 4m²` matrices assembled with
//! Kronecker products, spinor factor first.

// tensor index loops read better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod action;
pub mod clifford;
pub mod dirac;
pub mod error;
pub mod fluct;
pub mod gauge;
pub mod io;
pub mod linalg;
pub mod sampler;
pub mod seed;
pub mod suite;
pub mod superop;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
