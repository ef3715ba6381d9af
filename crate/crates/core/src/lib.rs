//! Generalized path problems on DAGs with parametric edge weights.
//!
//! * [`solver`]: exact optimal path for scalar affine weights at a fixed start value.
//! * [`pgpp`]: the full start-value to optimal-path table built from envelopes.
//! * [`oracle`]: exhaustive enumeration used as ground truth.
//! * [`gadgets`]: generators for the layered two-choice graph families.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix it to exact
//! big rationals, which is what every correctness guarantee assumes.

pub mod error;
pub mod gadgets;
pub mod model;
pub mod oracle;
pub mod pgpp;
pub mod piecewise;
pub mod random;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use model::{path_cost, validate_instance, AffineMap, Dag, Edge, EdgeId, Path, ScalarWeight, VertexId, Weights};
pub use piecewise::{lower_envelope, upper_envelope, AnnotatedPl, Line};
pub use scalar::Scalar;

use num_bigint::BigInt;

/// Arbitrary-precision rational; always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub type PlFunction = piecewise::PlFunction<Rational>;
pub type PlFunction64 = piecewise::PlFunction<f64>;
pub type GppInstance = model::GppInstance<Rational>;
pub type GppInstance64 = model::GppInstance<f64>;
pub type PgppTable = pgpp::PgppTable<Rational>;
pub type PgppTable64 = pgpp::PgppTable<f64>;

/// The integer `v` as a rational.
pub fn q(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `num / den` reduced. Panics if `den == 0`.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
