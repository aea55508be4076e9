//! Exact polynomial arithmetic over the rationals.
//!
//! [`MPoly`] is the sparse multivariate carrier used for ideal generators,
//! maps and group actions. [`UPoly`] views a polynomial as univariate in one
//! distinguished variable with multivariate coefficients, which is what
//! resultants and discriminants need. [`QPoly`] is the dense univariate
//! polynomial over `Q` used for minimal polynomials, and [`fp`]/[`gf`] hold
//! the finite-field machinery used for reductions modulo primes.

mod mpoly;
mod parse;
mod qpoly;
mod ring;
mod upoly;

pub mod fp;
pub mod gf;

pub use mpoly::{Homogeneity, MPoly};
pub use parse::{parse_poly, ParseError};
pub use qpoly::QPoly;
pub use ring::{Mono, Ring};
pub use upoly::{discriminant, resultant, sylvester_matrix, UPoly};
pub(crate) use upoly::qpoly_discriminant;

pub use fp::{factor_mod_p, ModPFactorization};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Arbitrary-precision rational; always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ring mismatch: [{left}] vs [{right}]")]
    RingMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("division is not exact")]
    InexactDivision,
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}
