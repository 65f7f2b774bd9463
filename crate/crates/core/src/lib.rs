//! Exact computer algebra for discovering, solving and certifying nonlinear
//! recurrences ("Somos-like" integrality phenomena) satisfied by subsequences
//! a(n) = f(p(n)) of C-finite sequences f at exponential-polynomial indices p.
//!
//! The crate is organised bottom-up:
//!
//! - [`polyarith`]: arbitrary-precision rationals and sparse multivariate
//!   (Laurent) polynomial / rational-function arithmetic.
//! - [`cfinite`]: C-finite sequences, exponential-polynomial index functions,
//!   and exact evaluation at huge indices via companion-matrix powering.
//! - [`binet`]: the quadratic Binet ring Q[alpha]/(alpha^2 - c*alpha + 1) with
//!   auxiliary variables alpha^(n^a * b^n), producing symbolic windows for
//!   a(n), ..., a(n+r).
//! - [`relation`]: polynomial relation discovery by undetermined coefficients
//!   over an exact modular-imaging nullspace.
//! - [`verifier`]: numeric annihilation, forward-iteration integrality,
//!   sequence agreement, symbolic certification, and the symbolic-c identity.
//!
//! All values are immutable and all public operations are pure; with the
//! default `parallel` feature the hot loops fan out over rayon, and the same
//! code paths degrade to sequential execution when the feature is disabled.

pub mod binet;
pub mod cfinite;
pub mod par;
pub mod polyarith;
pub mod relation;
pub mod verifier;

pub use polyarith::{Integer, Rational};
