use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, Signed, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar the numerical kernels are generic over.
///
/// Blanket-implemented for `f32` and `f64`. The supertraits line up with
/// `rustfft::FftNum`, so any `Real` drives the fast sine transform as well.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Signed
    + NumAssignOps
    + rustfft::FftNum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("value representable in scalar type")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Signed
        + NumAssignOps
        + rustfft::FftNum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// True when every entry is finite.
pub(crate) fn all_finite<T: Real>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}
