//! The localized representation ring of a torus.
//!
//! Elements are Laurent polynomials in `q_i^{1/2}` over `Q`, divided by
//! products of binomials `1 - x^c`. Exponents are counted in half-units.

mod elem;
mod exponent;
pub mod lattice;
mod poly;
mod text;

pub use elem::{DenomFactor, IntegralityReport, LocalizedElem};
pub use exponent::HalfExponent;
pub use poly::{monomial_value, Coeff, LaurentPoly};
pub use text::{parse_coeff, VarNames};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("non-invertible element")]
    NonInvertible,
    #[error("pole at evaluation point")]
    Pole,
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed ring element: {0}")]
    Malformed(String),
}

/// Shorthand for an integer coefficient.
pub fn int(c: i64) -> Coeff {
    Coeff::from_integer(c.into())
}

/// Shorthand for a rational coefficient `a/b`.
pub fn ratio(a: i64, b: i64) -> Coeff {
    Coeff::new(a.into(), b.into())
}
