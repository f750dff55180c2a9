//! Hierarchy of heat-conduction laws of order `n`, with and without memory.
//!
//! * [`coefficients`] builds the exact α/β tables from a [`ParameterSequence`].
//! * [`law`] assembles heat laws, relaxes exponential memory into the next
//!   order, derives evolution equations, and classifies them.
//! * [`solver`] reduces an equation on `(0, L)` with Dirichlet conditions to
//!   independent eigenmode ODEs, integrates them, and analyzes their roots.
//! * [`harness`] runs the verification suites behind the `verify` command.

pub mod cli;
pub mod coefficients;
pub mod error;
pub mod harness;
pub mod law;
pub mod rational;
pub mod solver;

pub use coefficients::{CoefficientTable, ParameterSequence};
pub use error::{Error, Result};
pub use rational::Rational;
