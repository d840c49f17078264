//! Scalar abstraction and dB/linear conversions.
//!
//! Every numeric kernel in the crate is generic over [`Real`], a blanket
//! trait covering `f32` and `f64` (and anything else that implements the
//! same `num-traits` surface). Gains are carried in dB throughout; the
//! conversion to linear power happens only inside SINR arithmetic.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by every kernel in this crate.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Display
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Display
        + Debug
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for pulling an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn c<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("constant representable in scalar type")
}

/// Converts a dB (or dBm) value to linear scale: `10^(x/10)`.
#[inline]
pub fn db_to_linear<F: Real>(db: F) -> F {
    c::<F>(10.0).powf(db / c(10.0))
}

/// Converts a linear power to dB: `10·log10(x)`. Zero maps to `-inf`.
#[inline]
pub fn linear_to_db<F: Real>(linear: F) -> F {
    c::<F>(10.0) * linear.log10()
}
