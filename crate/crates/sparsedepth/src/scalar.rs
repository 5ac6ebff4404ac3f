//! Scalar abstraction so the whole pipeline runs at either `f32` or `f64`.

/// Floating-point scalar the geometry code is generic over.
///
/// Implemented for `f32` and `f64`. The bounds are the minimum the numerics
/// need: IEEE arithmetic, conversion from literals, and formatted output for
/// diagnostics.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumCast
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::ops::DivAssign
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant to `T`, rounding to nearest.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 to Real conversion is total for f32/f64")
}

/// Widens a scalar to `f64` for accumulation or printing.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("Real to f64 conversion is total for f32/f64")
}
