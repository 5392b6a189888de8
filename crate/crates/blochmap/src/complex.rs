//! Minimal complex type generic over the scalar precision.

use crate::scalar::Real;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cx<R> {
    #[inline]
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Cx::new(R::from_f64(re), R::from_f64(im))
    }

    pub fn zero() -> Self {
        Cx::new(R::zero(), R::zero())
    }

    pub fn one() -> Self {
        Cx::new(R::one(), R::zero())
    }

    pub fn i() -> Self {
        Cx::new(R::zero(), R::one())
    }

    /// cos(angle) + i sin(angle)
    pub fn from_polar(modulus: R, angle: R) -> Self {
        Cx::new(modulus * angle.cos(), modulus * angle.sin())
    }

    #[inline]
    pub fn conj(self) -> Self {
        Cx::new(self.re, -self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> R {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> R {
        self.norm_sqr().sqrt()
    }

    pub fn arg(self) -> R {
        self.im.atan2(self.re)
    }

    #[inline]
    pub fn scale(self, k: R) -> Self {
        Cx::new(self.re * k, self.im * k)
    }

    pub fn div(self, rhs: Self) -> Self {
        let d = rhs.norm_sqr();
        (self * rhs.conj()).scale(R::one() / d)
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        let m = self.abs();
        let two = R::from_f64(2.0);
        let re = ((m + self.re) / two).max(R::zero()).sqrt();
        let mut im = ((m - self.re) / two).max(R::zero()).sqrt();
        if self.im < R::zero() {
            im = -im;
        }
        Cx::new(re, im)
    }

    pub fn is_zero(self) -> bool {
        self.re == R::zero() && self.im == R::zero()
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> Add for Cx<R> {
    type Output = Cx<R>;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Cx::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<R: Real> Sub for Cx<R> {
    type Output = Cx<R>;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Cx::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<R: Real> Mul for Cx<R> {
    type Output = Cx<R>;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Cx::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl<R: Real> Neg for Cx<R> {
    type Output = Cx<R>;
    #[inline]
    fn neg(self) -> Self {
        Cx::new(-self.re, -self.im)
    }
}

/// A point on the extended complex plane (Riemann sphere chart).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex<R> {
    Finite(Cx<R>),
    Infinity,
}

impl<R: Real> ExtComplex<R> {
    pub fn finite(self) -> Option<Cx<R>> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_div_roundtrip() {
        let a: Cx<f64> = Cx::new(0.3, -0.7);
        let b = Cx::new(-1.2, 0.4);
        let c = a.mul(b).div(b);
        assert!((c.re - a.re).abs() < 1e-15 && (c.im - a.im).abs() < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        for (re, im) in [(2.0, 3.0), (-1.0, 0.5), (-4.0, -0.0), (0.0, -9.0)] {
            let z: Cx<f64> = Cx::new(re, im);
            let w = z.sqrt();
            let back = w * w;
            assert!(
                (back.re - re).abs() < 1e-12 && (back.im - im).abs() < 1e-12,
                "sqrt({re},{im}) gave {w:?}"
            );
        }
    }
}
