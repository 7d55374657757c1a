//! The differential-polynomial ring ℚ[x, x⁻¹; V, V′, V″, …].
//!
//! Elements are finite sums of terms `c · x^m · Π_k (V^{(k)})^{e_k}` with
//! exact rational coefficients `c`, integer (possibly negative) powers of the
//! independent variable `x`, and jet variables `V^{(k)}` representing the
//! `k`-th derivative of the dependent function `V(x)`.
//!
//! Negative powers of `x` are admitted so that operators and potentials with
//! inverse-power coefficients (e.g. `2/x²`) live in the same exact arithmetic
//! as everything else. The only consequence is that `1/x` has no
//! antiderivative in the ring; [`calculus::antiderivative`] reports this
//! faithfully.

mod calculus;
mod io;
mod poly;

pub use calculus::{
    antiderivative, nth_total_derivative, total_derivative, variational_derivative,
};
pub use io::{poly_from_json, poly_to_json};
pub use poly::{DiffPoly, Monomial};

use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = num_rational::BigRational;

/// Build a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

/// Build a rational from an integer.
pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(num.into())
}

/// Errors produced by ring-level algorithms.
#[derive(Debug, Error)]
pub enum RingError {
    /// The argument is not a total `x`-derivative of any ring element; the
    /// non-integrable remainder is reported for diagnostics.
    #[error("element is not a total derivative; obstruction: {obstruction}")]
    NotExact {
        /// Remainder left once every integrable part has been stripped.
        obstruction: DiffPoly,
    },
    /// A serialized polynomial failed validation.
    #[error("malformed polynomial serialization: {0}")]
    Malformed(String),
}
