//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi)/2`, giving roughly 106 bits of significand.
//!
//! Only what the interval collocation needs is provided: field operations,
//! square root, `sin`/`cos` and `atan2`. The transcendental functions are
//! accurate to a few units in the last double-double place for arguments of
//! moderate size (|x| < 1e3).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const FRAC_PI_2: Self = Self {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123_233_995_736_766e-17,
    };
    /// 2^-104.
    pub const EPSILON: f64 = 4.930_380_657_631_324e-32;

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let s = Self::from_f64(self.hi.sqrt());
        s + (self - s * s) / (s + s)
    }

    /// Largest integer not above `self`.
    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, self.lo.floor());
            Self { hi: h, lo: l }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    pub fn sin_cos(self) -> (Self, Self) {
        if self.hi == 0.0 {
            return (self, Self::ONE);
        }
        // x = k·π/2 + r with |r| <= π/4
        let k = (self.hi / std::f64::consts::FRAC_PI_2).round();
        let r = self - Self::FRAC_PI_2 * Self::from_f64(k);
        let (s, c) = sin_cos_taylor(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    /// Four-quadrant arctangent of `self / x`, refined by Newton steps from the
    /// double-precision value.
    pub fn atan2(self, x: Self) -> Self {
        let y = self;
        if y.hi == 0.0 && x.hi == 0.0 {
            return Self::ZERO;
        }
        let mut a = Self::from_f64(y.hi.atan2(x.hi));
        for _ in 0..2 {
            let (s, c) = a.sin_cos();
            let num = y * c - x * s;
            let den = x * c + y * s;
            a += num / den;
        }
        a
    }
}

fn sin_cos_taylor(r: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let r2 = r * r;
    let tiny = DoubleDouble::EPSILON * 1e-3;

    let mut sin = r;
    let mut term = r;
    let mut k = 1.0;
    loop {
        term = -(term * r2) / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
        sin += term;
        k += 2.0;
        if term.hi.abs() < tiny {
            break;
        }
    }

    let mut cos = DoubleDouble::ONE;
    let mut term = DoubleDouble::ONE;
    let mut k = 0.0;
    loop {
        term = -(term * r2) / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
        cos += term;
        k += 2.0;
        if term.hi.abs() < tiny {
            break;
        }
    }
    (sin, cos)
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * Self::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Self::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let t = if q.hi < 0.0 { -(-q).floor() } else { q.floor() };
        self - t * b
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Self::from_f64)
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }

    #[test]
    fn third_times_three_is_one() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0) - dd(1.0);
        assert!(back.to_f64().abs() < 1e-31);
        // the low word carries the part a plain f64 loses
        assert!(third.lo().abs() > 0.0);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let r = dd(2.0).sqrt();
        assert!((r * r - dd(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn pythagorean_identity_holds_to_double_double_precision() {
        for &x in &[0.1, 0.7, 1.3, 2.9, -2.2, 3.1, 10.0, -17.5] {
            let (s, c) = (dd(x) / dd(3.0)).sin_cos();
            let one = s * s + c * c;
            assert!((one - dd(1.0)).to_f64().abs() < 1e-30, "x = {x}");
        }
    }

    #[test]
    fn sine_matches_high_precision_reference() {
        // sin(1/3) = 0.32719469679615224417334408...
        let s = (dd(1.0) / dd(3.0)).sin();
        let reference = DoubleDouble::new(0.327_194_696_796_152_26, -1.814_582_427_259_488_7e-17);
        assert!((s - reference).to_f64().abs() < 1e-29);
        // cos(pi) = -1, sin(pi/2) = 1 exactly to dd precision
        assert!((DoubleDouble::PI.cos() + dd(1.0)).to_f64().abs() < 1e-31);
        assert!((DoubleDouble::FRAC_PI_2.sin() - dd(1.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn atan2_inverts_sin_cos() {
        for &a in &[0.3, -1.2, 2.9, -3.0, 1.5707] {
            let angle = dd(a) + dd(1e-20);
            let (s, c) = angle.sin_cos();
            let back = s.atan2(c);
            assert!((back - angle).to_f64().abs() < 1e-30, "a = {a}");
        }
        assert!((dd(1.0).atan2(dd(0.0)) - DoubleDouble::FRAC_PI_2).to_f64().abs() < 1e-31);
    }
}
