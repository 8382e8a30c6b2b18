//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// The FFT-backed transforms additionally require `rustfft::FftNum`, which is
/// implemented for both primitive floats, so it is folded in here.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn from_isize_lossy(n: isize) -> Self {
        <Self as FromPrimitive>::from_isize(n).expect("isize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sin(πu)/(πu)` with the removable singularity filled in.
pub fn sinc<T: Real>(u: T) -> T {
    if u == T::zero() {
        T::one()
    } else {
        let x = T::PI() * u;
        x.sin() / x
    }
}

/// Linearly spaced grid including both endpoints.
pub fn linspace<T: Real>(start: T, end: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / T::from_usize_lossy(count - 1);
            (0..count)
                .map(|i| start + step * T::from_usize_lossy(i))
                .collect()
        }
    }
}
