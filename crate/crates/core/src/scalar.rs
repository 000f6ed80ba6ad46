//! Scalar abstractions.
//!
//! Boolean kernels stay on machine integers. Distances are generic over
//! [`Real`] (f32, f64). Ratios such as the Jaccard index are generic over
//! [`Scalar`], which also admits exact rationals.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};
use std::fmt::Debug;

/// Field-like scalar with an exact embedding of counts.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    fn from_count(n: u64) -> Self;
    fn to_f64_lossy(&self) -> f64;
}

/// Floating-point scalar used for geometric data.
pub trait Real: Scalar + Float + FromPrimitive + Send + Sync + Copy + 'static {}

impl Scalar for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }
    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Real for f32 {}
impl Real for f64 {}

impl Scalar for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count fits in i64"))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// `num / den` in `S`; `den` must be positive.
pub fn ratio<S: Scalar>(num: u64, den: u64) -> S {
    debug_assert!(den > 0);
    S::from_count(num) / S::from_count(den)
}
