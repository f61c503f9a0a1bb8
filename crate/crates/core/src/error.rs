use thiserror::Error;

use crate::linalg::{Complex, LinalgError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("point {point} is within {distance:e} of the singular point {singular}")]
    PoleHit {
        point: Complex,
        singular: Complex,
        distance: f64,
    },

    #[error("points {a} and {b} collide (separation {distance:e})")]
    Collision { a: Complex, b: Complex, distance: f64 },

    #[error("derivative at {point} is degenerate (|value| = {magnitude:e})")]
    DegenerateDerivative { point: Complex, magnitude: f64 },

    #[error("matrix is not rank one (numerical rank {rank})")]
    NotRankOne { rank: usize },

    #[error("gauge entry {index} is zero")]
    ZeroGaugeEntry { index: usize },

    #[error("spectra overlap: {a} and {b} are {distance:e} apart")]
    SpectraOverlap { a: Complex, b: Complex, distance: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inconsistent data: {check} residual {residual:e} exceeds {tol:e}")]
    InconsistentData { check: String, residual: f64, tol: f64 },

    #[error("coupling matrix is singular or ill-conditioned (cond {cond:e})")]
    SingularCoupling { cond: f64 },

    #[error("point outside the domain of the chain function: {0}")]
    DomainViolation(String),

    #[error("random instance generation failed after {retries} attempts")]
    GenerationFailed { retries: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("point {point} lies on the contour (distance {distance:e})")]
    OnContour { point: Complex, distance: f64 },

    #[error("pole/zero counts differ inside the contour: {poles_inside} poles vs {zeros_inside} zeros")]
    CardinalityMismatch { poles_inside: usize, zeros_inside: usize },

    #[error("no spectral factorization: leading coupling block is singular (cond {cond:e})")]
    NoFactorization { cond: f64 },

    #[error("factorization verification failed: residual {residual:e} exceeds {tol:e}")]
    VerificationFailed { residual: f64, tol: f64 },
}
