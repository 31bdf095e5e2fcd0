//! Real scalar abstraction shared by the `f64` and double-double code paths.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Num, NumAssign};

use crate::dd::DoubleDouble;
use crate::qd::QuadDouble;

pub trait Real:
    Copy
    + Num
    + NumAssign
    + Neg<Output = Self>
    + PartialOrd
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Unit roundoff of the representation.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;
    fn pi() -> Self;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = DoubleDouble::EPSILON;

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        DoubleDouble::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        DoubleDouble::atan2(self, x)
    }
    #[inline]
    fn pi() -> Self {
        DoubleDouble::PI
    }
}

impl Real for QuadDouble {
    const EPSILON: f64 = QuadDouble::EPSILON;

    #[inline]
    fn from_f64(x: f64) -> Self {
        QuadDouble::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        QuadDouble::to_f64(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        QuadDouble::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        QuadDouble::abs(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        QuadDouble::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        QuadDouble::atan2(self, x)
    }
    #[inline]
    fn pi() -> Self {
        QuadDouble::PI
    }
}

/// `sqrt(a² + b²)` without spurious overflow.
pub fn hypot<T: Real>(a: T, b: T) -> T {
    let (a, b) = (a.abs(), b.abs());
    let (big, small) = if a > b { (a, b) } else { (b, a) };
    if big == T::zero() {
        return T::zero();
    }
    let q = small / big;
    big * (T::one() + q * q).sqrt()
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    hypot(z.re, z.im)
}

#[inline]
pub fn carg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// Principal square root.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let zero = T::zero();
    if z.re == zero && z.im == zero {
        return Complex::new(zero, zero);
    }
    let half = T::from_f64(0.5);
    let r = cabs(z);
    if z.re >= zero {
        let t = ((r + z.re) * half).sqrt();
        Complex::new(t, z.im / (t + t))
    } else {
        let t = ((r - z.re) * half).sqrt();
        let t = if z.im < zero { -t } else { t };
        Complex::new(z.im / (t + t), t)
    }
}

pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csqrt_squares_back_in_every_quadrant() {
        for &(re, im) in &[(1.0, 2.0), (-3.0, 0.5), (-2.0, -1.0), (0.5, -4.0), (-1.0, 0.0)] {
            let z = Complex::new(re, im);
            let s = csqrt(z);
            assert!((s * s - z).norm() < 1e-14);
            assert!(s.re >= 0.0);
        }
    }

    #[test]
    fn generic_helpers_agree_between_precisions() {
        let z = Complex::new(0.3, -0.7);
        let zd: Complex<DoubleDouble> = from_c64(z);
        assert!((cabs(zd).to_f64() - z.norm()).abs() < 1e-16);
        assert!((carg(zd).to_f64() - z.arg()).abs() < 1e-16);
        assert!((to_c64(csqrt(zd)) - z.sqrt()).norm() < 1e-15);
        assert!((to_c64(cis(DoubleDouble::from_f64(1.1))) - Complex::from_polar(1.0, 1.1)).norm() < 1e-16);
    }
}
