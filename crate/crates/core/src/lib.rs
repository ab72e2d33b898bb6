//! Best constants in the inequality `inf |f^(n)| <= C ||f||_p`.
//!
//! The smallest admissible constant on a segment `I` is
//! `C*(n, p, I) = n! / D**(n, p, I)`, where `D**` is the least `L^p` norm of a
//! monic polynomial of degree `n` on `I`. This crate computes `D**` and the
//! minimizing polynomial `T_{n,p,I}` for every `p` in `(0, inf]`, converts them
//! into constants, and checks the known closed forms and bounds.
//!
//! Layout:
//!
//! * [`polynomials`]: monic polynomials in root form, classical families,
//!   affine rescaling between intervals.
//! * [`quadrature`]: `L^p` norms with root-split tanh-sinh panels and the
//!   sup norm from critical points.
//! * [`extremal`]: the minimal-norm monic polynomial (closed forms, a
//!   multi-start Nelder-Mead solver and a brute-force grid oracle).
//! * [`constants`]: `C(n,p)`, `C*(n,p,I)`, bounds and the derivative
//!   inequality itself.
//! * [`explorer`]: parameter sweeps over `p` and `n`.
//! * [`verify`]: named check suites used by the command-line front end.

pub mod constants;
pub mod explorer;
pub mod extremal;
pub mod polynomials;
pub mod quadrature;
pub mod special;
pub mod verify;

mod error;

pub use constants::{constant, ConstantReport};
pub use error::{Error, Result};
pub use extremal::{solve_extremal, ExtremalSolution, SolveOptions};
pub use polynomials::{Interval, MonicPolynomial, SymmetricRootVector};
pub use quadrature::{PNorm, QuadratureResult};
