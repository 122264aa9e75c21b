//! Scalar abstraction shared by plain `f64` arithmetic and first-order
//! dual numbers over the four spacetime coordinates.
//!
//! Linear-algebra routines written against [`Scalar`] run once on values and
//! once on [`Dual4`] to obtain exact coordinate derivatives of the result.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn from_f64(x: f64) -> Self;
    /// Primal value, used for pivoting and threshold decisions.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Value plus gradient with respect to x0..x3.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dual4 {
    pub re: f64,
    pub eps: [f64; 4],
}

impl Dual4 {
    pub const fn new(re: f64, eps: [f64; 4]) -> Self {
        Self { re, eps }
    }

    pub const fn constant(re: f64) -> Self {
        Self { re, eps: [0.0; 4] }
    }
}

impl Scalar for Dual4 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dual4::constant(x)
    }
    #[inline]
    fn value(&self) -> f64 {
        self.re
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        let k = 0.5 / s;
        Dual4::new(s, self.eps.map(|e| e * k))
    }
}

impl Add for Dual4 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        let mut eps = self.eps;
        for (e, oe) in eps.iter_mut().zip(o.eps) {
            *e += oe;
        }
        Dual4::new(self.re + o.re, eps)
    }
}

impl Sub for Dual4 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        let mut eps = self.eps;
        for (e, oe) in eps.iter_mut().zip(o.eps) {
            *e -= oe;
        }
        Dual4::new(self.re - o.re, eps)
    }
}

impl Mul for Dual4 {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let mut eps = [0.0; 4];
        for (i, e) in eps.iter_mut().enumerate() {
            *e = self.eps[i] * o.re + self.re * o.eps[i];
        }
        Dual4::new(self.re * o.re, eps)
    }
}

impl Div for Dual4 {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.re;
        let q = self.re * inv;
        let mut eps = [0.0; 4];
        for (i, e) in eps.iter_mut().enumerate() {
            *e = (self.eps[i] - q * o.eps[i]) * inv;
        }
        Dual4::new(q, eps)
    }
}

impl Neg for Dual4 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual4::new(-self.re, self.eps.map(|e| -e))
    }
}

impl AddAssign for Dual4 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Dual4 {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
