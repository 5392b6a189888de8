//! Double-double arithmetic: an unevaluated sum of two `f64`s giving ~32
//! significant decimal digits.
//!
//! Orbit pairs separated by 1e-8 under chaotic stretching need headroom well
//! past binary64 over the ~60-iteration horizons used here, so this is the
//! reference precision. Error-free transforms follow Dekker/Knuth; `two_prod`
//! relies on fused multiply-add. Transcendentals: sin/cos by quadrant
//! reduction + Taylor, atan2 by one Newton step off the `f64` seed, sqrt by
//! Karp's method.

use crate::scalar::Real;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const PI: Dd = Dd { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
const HALF_PI: Dd = Dd { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (s, e) = two_sum(a, b);
        Dd::new(s, e)
    }

    #[inline]
    pub fn sqr(self) -> Self {
        let (p, mut e) = two_prod(self.hi, self.hi);
        e += 2.0 * self.hi * self.lo;
        e += self.lo * self.lo;
        let (s, e) = quick_two_sum(p, e);
        Dd::new(s, e)
    }

    fn recip_sqrt_seed(self) -> f64 {
        1.0 / self.hi.sqrt()
    }

    fn sin_taylor(self) -> Self {
        // |self| <= pi/4
        if self.hi == 0.0 {
            return Dd::from_f64(0.0);
        }
        let x2 = self.sqr();
        let mut term = self;
        let mut sum = self;
        let mut k = 1.0f64;
        loop {
            term = term * x2;
            term = term / Dd::from_f64(-((k + 1.0) * (k + 2.0)));
            sum = sum + term;
            k += 2.0;
            if term.hi.abs() < 1e-35 * sum.hi.abs() || k > 40.0 {
                break;
            }
        }
        sum
    }

    fn cos_taylor(self) -> Self {
        let x2 = self.sqr();
        let mut term = Dd::from_f64(1.0);
        let mut sum = term;
        let mut k = 0.0f64;
        loop {
            term = term * x2;
            term = term / Dd::from_f64(-((k + 1.0) * (k + 2.0)));
            sum = sum + term;
            k += 2.0;
            if term.hi.abs() < 1e-35 || k > 40.0 {
                break;
            }
        }
        sum
    }

    /// (sin, cos) with a single argument reduction.
    pub fn sin_cos(self) -> (Self, Self) {
        let k = (self.hi / HALF_PI.hi).round();
        let r = self - HALF_PI * Dd::from_f64(k);
        let (s, c) = (r.sin_taylor(), r.cos_taylor());
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd::new(s1, s2)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, mut e) = two_prod(self.hi, rhs.hi);
        e += self.hi * rhs.lo + self.lo * rhs.hi;
        let (s, e) = quick_two_sum(p, e);
        Dd::new(s, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::from_sum(s, e) + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Real for Dd {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd::new(x, 0.0)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi
    }

    fn zero() -> Self {
        Dd::new(0.0, 0.0)
    }

    fn one() -> Self {
        Dd::new(1.0, 0.0)
    }

    fn pi() -> Self {
        PI
    }

    fn epsilon() -> Self {
        Dd::new(4.93e-32, 0.0) // 2^-104
    }

    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::zero();
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        // Karp: one correction off the f64 seed doubles the digits.
        let x = self.recip_sqrt_seed();
        let ax = self.hi * x;
        let err = self - Dd::from_f64(ax).sqr();
        Dd::from_f64(ax) + Dd::from_f64(err.hi * (x * 0.5))
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn atan2(self, other: Self) -> Self {
        let (y, x) = (self, other);
        if y.hi == 0.0 && x.hi == 0.0 {
            return Dd::zero();
        }
        let r = (x.sqr() + y.sqr()).sqrt();
        let xn = x / r;
        let yn = y / r;
        // f64 seed is within ~1e-16 of the true angle; the residual
        // yn*cos - xn*sin = sin(true - seed), so one update suffices.
        let seed = Dd::from_f64(y.hi.atan2(x.hi));
        let (s, c) = seed.sin_cos();
        seed + (yn * c - xn * s)
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values computed with mpmath at 45 digits
    const SIN_1: Dd = Dd { hi: 0.8414709848078965, lo: 1.776845092935536e-18 };
    const COS_1: Dd = Dd { hi: 0.5403023058681398, lo: -4.760954612604417e-17 };
    const SIN_0_3: Dd = Dd { hi: 0.29552020666133955, lo: 1.8315357276792536e-17 };
    const COS_0_3: Dd = Dd { hi: 0.955336489125606, lo: 4.1935600297907467e-17 };
    const SIN_5_5: Dd = Dd { hi: -0.7055403255703919, lo: 1.7849628865181567e-17 };
    const COS_5_5: Dd = Dd { hi: 0.70866977429126, lo: 9.365692374299323e-18 };
    const SQRT_2: Dd = Dd { hi: 1.4142135623730951, lo: -9.667293313452913e-17 };
    const SQRT_0_7: Dd = Dd { hi: 0.8366600265340756, lo: -4.12265279558505e-17 };
    const ATAN2_1_2: Dd = Dd { hi: 0.4636476090008061, lo: 2.2698777452961687e-17 };
    const ATAN2_M4_M3: Dd = Dd { hi: -2.214297435588181, lo: -1.4368050648632134e-16 };
    const THIRD: Dd = Dd { hi: 0.3333333333333333, lo: 1.850371707708594e-17 };
    const ACOS_0_25: Dd = Dd { hi: 1.318116071652818, lo: -8.628309713092261e-19 };

    fn close(a: Dd, b: Dd, tol: f64) {
        let d = (a - b).abs();
        assert!(d.hi <= tol, "{a:?} vs {b:?} differ by {d:?}");
    }

    #[test]
    fn field_ops_roundtrip() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        close(a, THIRD, 1e-32);
        close(a * Dd::from_f64(3.0), Dd::from_f64(1.0), 1e-32);
        let b = Dd::from_f64(0.1) + Dd::from_f64(0.2);
        close(b - Dd::from_f64(0.2), Dd::from_f64(0.1), 1e-32);
        close((a / b) * b, a, 1e-32);
    }

    #[test]
    fn sum_captures_rounding() {
        // 0.1 + 0.2 in f64 is off by ~5.5e-18; dd keeps it
        let s = Dd::from_f64(0.1) + Dd::from_f64(0.2);
        assert!(s.lo != 0.0);
        assert!((s.hi - 0.30000000000000004).abs() < 1e-17);
    }

    #[test]
    fn sqrt_matches_reference() {
        close(Dd::from_f64(2.0).sqrt(), SQRT_2, 1e-31);
        close(Dd::from_f64(0.7).sqrt(), SQRT_0_7, 1e-31);
        let x = Dd::from_f64(1.0) / Dd::from_f64(7.0);
        close(x.sqrt().sqr(), x, 1e-31);
        assert_eq!(Dd::zero().sqrt(), Dd::zero());
    }

    #[test]
    fn trig_matches_reference() {
        close(Dd::from_f64(1.0).sin(), SIN_1, 1e-31);
        close(Dd::from_f64(1.0).cos(), COS_1, 1e-31);
        close(Dd::from_f64(0.3).sin(), SIN_0_3, 1e-31);
        close(Dd::from_f64(0.3).cos(), COS_0_3, 1e-31);
        close(Dd::from_f64(5.5).sin(), SIN_5_5, 1e-31);
        close(Dd::from_f64(5.5).cos(), COS_5_5, 1e-31);
    }

    #[test]
    fn pythagorean_identity() {
        for i in 0..200 {
            let x = Dd::from_f64(-6.0 + 0.061 * i as f64);
            let (s, c) = x.sin_cos();
            close(s.sqr() + c.sqr(), Dd::one(), 1e-30);
        }
    }

    #[test]
    fn atan2_matches_reference() {
        close(Dd::from_f64(1.0).atan2(Dd::from_f64(2.0)), ATAN2_1_2, 1e-31);
        close(Dd::from_f64(-0.4).atan2(Dd::from_f64(-0.3)), ATAN2_M4_M3, 1e-30);
        close(Dd::from_f64(0.25).acos(), ACOS_0_25, 1e-30);
    }

    #[test]
    fn atan2_inverts_sin_cos() {
        for i in 1..100 {
            let th = Dd::from_f64(-3.1 + 0.062 * i as f64);
            let (s, c) = th.sin_cos();
            close(s.atan2(c), th, 1e-30);
        }
    }

    #[test]
    fn ordering_uses_both_limbs() {
        let a = Dd::from_f64(1.0);
        let b = a + Dd::new(1e-25, 0.0);
        assert!(b > a);
        assert!(a < b);
        assert!(Dd::new(-1.0, -1e-20).abs() > Dd::from_f64(1.0));
    }

    #[test]
    fn tiny_angle_sum_resolves() {
        // the whole point of this type: theta and theta+1e-20 stay distinct
        let th = Dd::from_f64(0.7);
        let d = Dd::from_f64(1e-20);
        let diff = (th + d) - th;
        close(diff, d, 1e-40);
    }
}
