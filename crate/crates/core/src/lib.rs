//! Quaternionic Clifford analysis on the unit ball of `R^4`.

pub mod acceptance;
pub mod algebra;
pub mod approx;
pub mod basis;
pub mod error;
pub mod poisson;
pub mod scalar;
pub mod sphere;
pub mod symfun;

pub use algebra::{c_pair, pi_project, q_dot, q_mul, Clifford, Quaternion};
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use symfun::{MultiIndex, RadialTerm, SymFunction};
