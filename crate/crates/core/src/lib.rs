//! Separable (1+3)-dimensional Pauli equations.
//!
//! Builds the ingredients of product-form solutions of the Pauli equation for
//! a spin-1/2 particle in a time-dependent electromagnetic field: the eleven
//! orthogonal coordinate families and their Stäckel matrices, the moving
//! Euler frame, the admissible electromagnetic potentials, the spin
//! propagator, and the reduced one-dimensional equations. Every construction
//! is backed by a numerical verifier (finite-difference PDE residuals,
//! Maxwell residuals, closed-form identities) so that a configured scenario
//! can be checked end to end at desk scale.

pub mod catalog;
pub mod cli;
pub mod coords;
pub mod error;
pub mod fields;
pub mod frame;
pub mod linalg;
mod parallel;
pub mod separation;
pub mod specialfn;
pub mod spinor;
pub mod timefn;

pub use error::{Error, Result};
pub use linalg::{C64, Mat2C, Mat3, Spinor2, Vec3};
