//! Real scalar abstraction shared by every module.
//!
//! All matrices hold `Complex<T>` entries where `T` is one of the IEEE float
//! types. The trait carries the few per-precision constants the algorithms
//! need (pruning threshold, solver target) so the numerics stay generic.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Stored entries with magnitude below this are pruned.
    fn drop_threshold() -> Self;

    /// Target for the Hecke-condition solver.
    fn solver_tolerance() -> Self;

    /// Largest condition estimate accepted by dense inversion.
    fn max_condition() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in every float type")
    }
}

impl Real for f64 {
    fn drop_threshold() -> Self {
        1e-14
    }

    fn solver_tolerance() -> Self {
        1e-13
    }

    fn max_condition() -> Self {
        1e13
    }
}

impl Real for f32 {
    fn drop_threshold() -> Self {
        1e-6
    }

    fn solver_tolerance() -> Self {
        2e-6
    }

    fn max_condition() -> Self {
        1e5
    }
}

pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// `exp(i·theta)`.
pub fn unimodular<T: Real>(theta: T) -> Complex<T> {
    Complex::from_polar(T::one(), theta)
}

/// Argument mapped into `[0, 2π)`.
pub fn positive_arg<T: Real>(z: Complex<T>) -> T {
    let arg = z.arg();
    if arg < T::zero() {
        arg + T::TAU()
    } else {
        arg
    }
}

/// Principal branch of `z^p`.
pub fn principal_pow<T: Real>(z: Complex<T>, p: T) -> Complex<T> {
    z.powf(p)
}

pub fn to_pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    [
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    ]
}

pub fn from_pair<T: Real>(pair: [f64; 2]) -> Complex<T> {
    cplx(pair[0], pair[1])
}

pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
