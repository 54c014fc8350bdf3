//! Scalar abstractions.
//!
//! The floating-point machinery (subspace lattice, modular data, towers, Fock
//! simulation) is generic over [`Real`], implemented for `f32` and `f64`.
//! Exact rank computations on symplectic skeletons are generic over
//! [`ExactField`], implemented for `f64` (with a negligibility cutoff) and for
//! arbitrary-precision rationals, where every decision is exact.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Real floating-point scalar used by all numerical modules.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Display + Send + Sync + 'static
{
    /// Relative singular-value cutoff: `σ ≥ rank_tol · σ_max` counts toward rank.
    /// Also the cosine slack used when intersecting subspaces.
    fn rank_tol() -> Self;
    /// Two subspaces are equal when their projections differ by at most this much
    /// in operator norm.
    fn subspace_tol() -> Self;
    /// Tolerance for operator identities (`s = jδ^{1/2}`, `j² = I`, ...).
    fn identity_tol() -> Self;
}

impl Real for f64 {
    fn rank_tol() -> Self {
        1e-10
    }
    fn subspace_tol() -> Self {
        1e-9
    }
    fn identity_tol() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn rank_tol() -> Self {
        1e-4
    }
    fn subspace_tol() -> Self {
        1e-3
    }
    fn identity_tol() -> Self {
        1e-3
    }
}

/// Shorthand for converting an `f64` literal into a generic scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A field in which "is this entry zero?" has a definite answer: exactly for
/// rationals, up to a fixed cutoff for floats.
pub trait ExactField:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Signed
    + ToPrimitive
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn is_negligible(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// True when every arithmetic decision made in this field is exact.
    const EXACT: bool;
}

impl ExactField for f64 {
    fn is_negligible(&self) -> bool {
        self.abs() <= 1e-11
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    const EXACT: bool = false;
}

impl ExactField for BigRational {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    const EXACT: bool = true;
}
