use thiserror::Error;

use crate::extremal::ExtremalSolution;
use crate::quadrature::QuadratureResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: need a < b, both finite")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid exponent p = {0}: need 0 < p")]
    InvalidP(f64),

    #[error("relative tolerance {0:e} outside [1e-14, 1e-3]")]
    InvalidTolerance(f64),

    #[error("quadrature stopped at relative error {:e} (value {})", best.estimated_rel_error, best.value)]
    ToleranceNotReached { best: QuadratureResult },

    #[error("degree {n} outside the supported range {min}..={max}")]
    DegreeOutOfRange { n: usize, min: usize, max: usize },

    #[error("invalid root vector: {0}")]
    InvalidRoots(String),

    #[error("solver did not converge for n = {}, p = {}", best.n, best.p)]
    NotConverged { best: Box<ExtremalSolution> },

    #[error("exponents do not satisfy 1/p = 1/q + 1/r (mismatch {0:e})")]
    ExponentMismatch(f64),

    #[error("derivative inequality violated: m_n(f) = {lhs} > C* ||f||_p = {rhs}")]
    InequalityViolated { lhs: f64, rhs: f64 },

    #[error("check failed: {0}")]
    CheckFailed(String),
}
