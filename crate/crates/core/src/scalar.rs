//! Floating-point scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the simulator is generic over (`f32` or `f64`).
///
/// Everything the circuit engine, the Pauli algebra and the ansatz builders
/// need is expressed through this trait. Linear-algebra entry points that
/// delegate to `nalgebra` additionally require `nalgebra::RealField`.
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
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Machine-precision-scaled tolerance used for structural checks
    /// (Hermiticity, unitarity) that must hold "exactly".
    fn structural_tol() -> Self;
}

impl Real for f64 {
    fn structural_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn structural_tol() -> Self {
        1e-5
    }
}

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn c_re<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn c_lit<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}
