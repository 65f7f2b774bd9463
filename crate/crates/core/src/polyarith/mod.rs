//! Exact arbitrary-precision arithmetic and sparse multivariate (Laurent)
//! polynomial / rational-function algebra.
//!
//! Coefficients are exact rationals throughout; monomials are sparse exponent
//! vectors ordered graded-lexicographically with the *last* declared variable
//! most significant (so a window relation leads with its newest term, e.g.
//! `x3^2 - x2^2 - x1^2`). Negative exponents are permitted at this level;
//! consumers that need ordinary polynomials restrict them.

mod exponent;
mod multipoly;
mod ratfunc;
pub mod textform;

pub use exponent::{ExponentVector, VarId, VarSet};
pub use multipoly::MultiPoly;
pub use ratfunc::RationalFunction;

/// Arbitrary-precision signed integer used for every sequence value and
/// recurrence coefficient.
pub type Integer = num_bigint::BigInt;

/// Exact rational in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Errors from polynomial and rational-function operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// Operands were built over different variable sets.
    VarMismatch,
    /// A denominator is (or became) identically zero.
    ZeroDenominator,
    /// The operation is undefined for the zero polynomial.
    ZeroPolynomial,
    /// A variable of the polynomial has no assignment.
    UnassignedVariable(String),
    /// Monomial exponent arithmetic left the i64 range.
    ExponentOverflow,
}

impl std::fmt::Display for PolyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolyError::VarMismatch => write!(f, "operands have different variable sets"),
            PolyError::ZeroDenominator => write!(f, "denominator is identically zero"),
            PolyError::ZeroPolynomial => write!(f, "operation undefined for the zero polynomial"),
            PolyError::UnassignedVariable(v) => write!(f, "variable {v} has no assignment"),
            PolyError::ExponentOverflow => write!(f, "monomial exponent out of range"),
        }
    }
}

impl std::error::Error for PolyError {}
