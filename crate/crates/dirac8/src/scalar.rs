//! Scalar abstraction: the whole toolkit is generic over the real base type.

use nalgebra as na;
use num_complex::Complex;

/// Real base type for all numerics in this crate.
///
/// Bundles the nalgebra and rustfft requirements so every module can be
/// written once and instantiated at `f32` or `f64`.
pub trait Real:
    na::RealField
    + rustfft::FftNum
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Copy
    + Default
    + Send
    + Sync
{
    const ZERO: Self;
    const ONE: Self;
}

macro_rules! impl_real {
    ($f:ty) => {
        impl Real for $f {
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Convert an `f64` literal into the working scalar type.
#[inline]
pub fn r<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Complex number over the working scalar type.
pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(r(re), r(im))
}

/// Complex zero.
#[inline]
pub fn c0<T: Real>() -> C<T> {
    Complex::new(T::ZERO, T::ZERO)
}

/// Complex one.
#[inline]
pub fn c1<T: Real>() -> C<T> {
    Complex::new(T::ONE, T::ZERO)
}

/// The imaginary unit.
#[inline]
pub fn ci<T: Real>() -> C<T> {
    Complex::new(T::ZERO, T::ONE)
}

/// Real scalar promoted to complex.
#[inline]
pub fn cr<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::ZERO)
}

/// Working scalar back to `f64` (for reports and dumps).
#[inline]
pub fn fd<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Magnitude of a complex value in the working scalar type.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}
