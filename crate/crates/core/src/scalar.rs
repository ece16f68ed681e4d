//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is satisfied by `f32`
//! and `f64`. Matrices carry complex entries `Complex<T>`.

use std::fmt::{Debug, Display};

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point scalar usable as the base field of the complex matrices.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into `Self`.
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    /// Lossy conversion to `f64` for reporting.
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Unit roundoff of the type, found by halving.
    fn machine_epsilon() -> Self {
        let two = Self::one() + Self::one();
        let mut e = Self::one();
        while Self::one() + e / two != Self::one() {
            e /= two;
        }
        e
    }

    fn is_finite_value(self) -> bool {
        self.as_f64().is_finite()
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Dense complex matrix, row/column sized at runtime.
pub type ComplexMatrix<T> = DMatrix<Complex<T>>;

/// Dense complex column vector.
pub type ComplexVector<T> = DVector<Complex<T>>;

/// Builds a complex number with zero imaginary part.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
