//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar type the toolkit is generic over: `f32` or `f64`.
///
/// Besides the arithmetic provided by [`num_traits::Float`], each scalar
/// carries the precision-dependent tolerances used by the eigensolver, the
/// symmetry checks and the stability classifier.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Off-diagonal mass (relative to the Frobenius norm) at which the
    /// symmetric eigensolver stops rotating.
    const EIGEN_TOLERANCE: f64;
    /// Relative tolerance accepted by symmetry checks.
    const SYMMETRY_TOLERANCE: f64;
    /// Relative width of the band around zero counted as a zero mode.
    const ZERO_MODE_TOLERANCE: f64;
    /// Max-norm residual below which a state counts as an equilibrium.
    const EQUILIBRIUM_TOLERANCE: f64;
}

impl Scalar for f64 {
    const EIGEN_TOLERANCE: f64 = 1e-12;
    const SYMMETRY_TOLERANCE: f64 = 1e-12;
    const ZERO_MODE_TOLERANCE: f64 = 1e-9;
    const EQUILIBRIUM_TOLERANCE: f64 = 1e-8;
}

impl Scalar for f32 {
    const EIGEN_TOLERANCE: f64 = 1e-6;
    const SYMMETRY_TOLERANCE: f64 = 1e-6;
    const ZERO_MODE_TOLERANCE: f64 = 1e-4;
    const EQUILIBRIUM_TOLERANCE: f64 = 1e-4;
}

/// Converts an `f64` literal into `T`.
///
/// Every supported scalar represents (a rounding of) every finite `f64`, so
/// the conversion cannot fail for finite input.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 converts to any Scalar")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("usize converts to any Scalar")
}

#[inline]
pub(crate) fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
