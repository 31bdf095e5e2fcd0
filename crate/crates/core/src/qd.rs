//! Quad-double arithmetic: an unevaluated sum of four `f64`s, roughly 212
//! bits of significand.
//!
//! Used where double-double is not enough: the interval collocation matrix is
//! so far from normal that its small eigenvalues move by about the square
//! root of the working precision. Additions are the "sloppy" kind (error
//! bounded by `ε·(|a| + |b|)`), which is all the QR iteration needs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct QuadDouble([f64; 4]);

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

#[inline]
fn three_sum(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    let (b, c) = two_sum(t2, t3);
    (a, b, c)
}

#[inline]
fn three_sum2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    (a, t2 + t3)
}

fn renorm(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> QuadDouble {
    if !c0.is_finite() {
        return QuadDouble([c0, 0.0, 0.0, 0.0]);
    }
    let (s, c4) = quick_two_sum(c3, c4);
    let (s, c3) = quick_two_sum(c2, s);
    let (s, c2) = quick_two_sum(c1, s);
    let (c0, c1) = quick_two_sum(c0, s);

    let mut out = [0.0; 4];
    let mut k = 0;
    let mut s = c0;
    for c in [c1, c2, c3, c4] {
        if k == 3 {
            s += c;
            continue;
        }
        let (sum, err) = quick_two_sum(s, c);
        if err != 0.0 {
            out[k] = sum;
            k += 1;
            s = err;
        } else {
            s = sum;
        }
    }
    out[k] = s;
    QuadDouble(out)
}

impl QuadDouble {
    pub const ZERO: Self = Self([0.0; 4]);
    pub const ONE: Self = Self([1.0, 0.0, 0.0, 0.0]);
    pub const PI: Self = Self([
        std::f64::consts::PI,
        1.224_646_799_147_353_2e-16,
        -2.994_769_809_718_339_7e-33,
        1.112_454_220_863_365_3e-49,
    ]);
    pub const FRAC_PI_2: Self = Self([
        std::f64::consts::FRAC_PI_2,
        6.123_233_995_736_766e-17,
        -1.497_384_904_859_169_8e-33,
        5.562_271_104_316_826e-50,
    ]);
    /// 2^-209.
    pub const EPSILON: f64 = 1.215_432_671_457_254_2e-63;

    pub fn new(limbs: [f64; 4]) -> Self {
        renorm(limbs[0], limbs[1], limbs[2], limbs[3], 0.0)
    }

    pub const fn from_f64(x: f64) -> Self {
        Self([x, 0.0, 0.0, 0.0])
    }

    pub fn limbs(self) -> [f64; 4] {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        let [a, b, c, d] = self.0;
        a + (b + (c + d))
    }

    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 || (self.0[0] == 0.0 && self.0[1] < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    fn mul_f64(self, b: f64) -> Self {
        let [a0, a1, a2, a3] = self.0;
        let (p0, q0) = two_prod(a0, b);
        let (p1, q1) = two_prod(a1, b);
        let (p2, q2) = two_prod(a2, b);
        let p3 = a3 * b;
        let (s1, s2) = two_sum(q0, p1);
        let (s2, q1, p2) = three_sum(s2, q1, p2);
        let (q1, q2) = three_sum2(q1, q2, p3);
        renorm(p0, s1, s2, q1, q2 + p2)
    }

    pub fn sqrt(self) -> Self {
        if self.0[0] <= 0.0 {
            return Self::ZERO;
        }
        let mut s = Self::from_f64(self.0[0].sqrt());
        let half = Self::from_f64(0.5);
        for _ in 0..3 {
            s = s + (self - s * s) / s * half;
        }
        s
    }

    /// Largest integer not above `self`.
    pub fn floor(self) -> Self {
        let mut out = [0.0; 4];
        for (k, &v) in self.0.iter().enumerate() {
            let f = v.floor();
            out[k] = f;
            if f != v {
                break;
            }
        }
        renorm(out[0], out[1], out[2], out[3], 0.0)
    }

    pub fn sin_cos(self) -> (Self, Self) {
        if self.0[0] == 0.0 {
            return (self, Self::ONE);
        }
        let k = (self.0[0] / std::f64::consts::FRAC_PI_2).round();
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

    /// Four-quadrant arctangent of `self / x`, refined from the `f64` value.
    /// Each step triples the number of correct digits.
    pub fn atan2(self, x: Self) -> Self {
        let y = self;
        if y.0[0] == 0.0 && x.0[0] == 0.0 {
            return Self::ZERO;
        }
        let mut a = Self::from_f64(y.0[0].atan2(x.0[0]));
        for _ in 0..3 {
            let (s, c) = a.sin_cos();
            a += (y * c - x * s) / (x * c + y * s);
        }
        a
    }
}

fn sin_cos_taylor(r: QuadDouble) -> (QuadDouble, QuadDouble) {
    // halve three times so the series converges quickly, then double back
    let r = r * QuadDouble::from_f64(0.125);
    let r2 = r * r;
    let tiny = QuadDouble::EPSILON * 1e-3;

    let mut sin = r;
    let mut term = r;
    let mut k = 1.0;
    loop {
        term = -(term * r2) / QuadDouble::from_f64((k + 1.0) * (k + 2.0));
        sin += term;
        k += 2.0;
        if term.0[0].abs() < tiny {
            break;
        }
    }
    let one = QuadDouble::ONE;
    let two = QuadDouble::from_f64(2.0);
    let mut cos = (one - sin * sin).sqrt();
    for _ in 0..3 {
        let s = two * sin * cos;
        cos = one - two * sin * sin;
        sin = s;
    }
    (sin, cos)
}

impl fmt::Debug for QuadDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "QuadDouble({a:e} + {b:e} + {c:e} + {d:e})")
    }
}

impl fmt::Display for QuadDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl From<f64> for QuadDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialOrd for QuadDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        for k in 0..4 {
            match self.0[k].partial_cmp(&other.0[k]) {
                Some(Ordering::Equal) => continue,
                ord => return ord,
            }
        }
        Some(Ordering::Equal)
    }
}

impl Neg for QuadDouble {
    type Output = Self;
    fn neg(self) -> Self {
        let [a, b, c, d] = self.0;
        Self([-a, -b, -c, -d])
    }
}

impl Add for QuadDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = b.0;
        let (s0, t0) = two_sum(a0, b0);
        let (s1, t1) = two_sum(a1, b1);
        let (s2, t2) = two_sum(a2, b2);
        let (s3, t3) = two_sum(a3, b3);
        let (s1, t0) = two_sum(s1, t0);
        let (s2, t0, t1) = three_sum(s2, t0, t1);
        let (s3, t0) = three_sum2(s3, t0, t2);
        renorm(s0, s1, s2, s3, t0 + t1 + t3)
    }
}

impl Sub for QuadDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for QuadDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = b.0;
        let (p0, q0) = two_prod(a0, b0);
        let (p1, q1) = two_prod(a0, b1);
        let (p2, q2) = two_prod(a1, b0);
        let (p3, q3) = two_prod(a0, b2);
        let (p4, q4) = two_prod(a1, b1);
        let (p5, q5) = two_prod(a2, b0);

        let (p1, p2, q0) = three_sum(p1, p2, q0);
        let (p2, q1, q2) = three_sum(p2, q1, q2);
        let (p3, p4, p5) = three_sum(p3, p4, p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let s2 = q2 + p5;
        let (s1, t0) = two_sum(s1, t0);
        let s2 = s2 + (t0 + t1);
        let s1 = s1 + (a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0 + q0 + q3 + q4 + q5);
        renorm(p0, p1, s0, s1, s2)
    }
}

impl Div for QuadDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q0 = self.0[0] / b.0[0];
        let r = self - b.mul_f64(q0);
        let q1 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q1);
        let q2 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q2);
        let q3 = r.0[0] / b.0[0];
        let r = r - b.mul_f64(q3);
        let q4 = r.0[0] / b.0[0];
        renorm(q0, q1, q2, q3, q4)
    }
}

impl Rem for QuadDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let t = if q.0[0] < 0.0 { -(-q).floor() } else { q.floor() };
        self - t * b
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for QuadDouble {
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

impl Zero for QuadDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl One for QuadDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for QuadDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Self::from_f64)
    }
}
