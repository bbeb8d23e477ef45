//! Exact computer algebra for two-state (conditionally free) probability:
//! non-commutative polynomials and truncated series, moment–cumulant
//! transforms, orthogonal polynomials, c-free Appell and Kailath–Segall
//! families, and a finite Fock-space model.

pub mod appell;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod ncpoly;
pub mod ncseries;
pub mod orthopoly;
pub mod partitions;
pub mod scalar;
pub mod states;
pub mod wire;
pub mod word;

pub use error::{Error, Result};
pub use scalar::Scalar;
