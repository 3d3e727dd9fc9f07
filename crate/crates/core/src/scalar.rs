//! Floating-point abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, NumCast};

/// Real scalar used throughout the crate: `f32` or `f64`.
///
/// Tolerances quoted in the documentation are calibrated for `f64`; the
/// `f32` instantiation works but most acceptance gates are out of its reach.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + NumCast + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a sample count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as NumCast>::from(n).expect("count representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
