//! Reductions between Orthogonal Vectors and its relatives, with
//! brute-force oracles for every problem involved.
//!
//! Boolean kernels work on packed words. Geometric code is generic over
//! [`scalar::Real`]; ratio computations are generic over
//! [`scalar::Scalar`] so they can run in exact rational arithmetic.

pub mod bits;
pub mod error;
pub mod gadgets;
pub mod harness;
pub mod instances;
pub mod lsh;
pub mod maxsat;
pub mod oracles;
pub mod protocols;
pub mod rng;
pub mod scalar;
pub mod subquadratic;

pub use bits::BitVec;
pub use error::{Error, Result};

/// Default floating-point scalar.
pub type Real = f64;
/// Exact rational scalar.
pub type Exact = num_rational::BigRational;
/// Small exact rational scalar.
pub type Exact64 = num_rational::Rational64;
/// Real point sets in the default precision.
pub type RealInstance = instances::RealPairInstance<Real>;
