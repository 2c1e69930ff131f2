//! Verification engine for the classical and supersymmetric Gaussian
//! irrotational flow equations.
//!
//! The crate is layered bottom-up: [`grassmann`] supplies exact arithmetic
//! over anticommuting constants, [`calculus`] differentiates fields whose
//! values live in that algebra, and the remaining modules evaluate the
//! equations, symmetries, reductions and closed-form solutions as residuals.

pub mod calculus;
pub mod correspondences;
pub mod error;
pub mod grassmann;
pub mod pde;
pub mod reductions;
pub mod solutions;
pub mod specfun;
pub mod superfield;
pub mod symmetry;

pub use error::{Error, Result};
pub use grassmann::{solve_implicit, Complex, GeneratorSet, GrassmannNumber, Parity};
