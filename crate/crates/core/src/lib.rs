//! Rational matrix functions in general position, described by their poles,
//! zeros and rank-one semiresidual data.
//!
//! The crate covers the scalar Cauchy-matrix prototype ([`cauchy`]), the
//! zero-pole data model ([`model`]), core and coupling matrices with the joint
//! system representations built from them ([`realization`]), synthesis of valid
//! instances from raw Sylvester data and the chain identity ([`chain`]), and
//! spectral factorization with respect to a circle ([`wiener_hopf`]).

pub mod cauchy;
pub mod chain;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod realization;
pub mod wiener_hopf;

#[cfg(test)]
mod testutil;

pub use diagnostics::{Check, CheckReport};
pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix};
