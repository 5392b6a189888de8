//! Scalar abstraction over the two working precisions.
//!
//! Every numerical kernel in this crate is generic over [`Real`], so a run can
//! execute either in plain `f64` or in double-double arithmetic ([`crate::dd::Dd`],
//! ~32 significant digits). The trait is deliberately small: only the operations
//! the kernels actually use.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    fn zero() -> Self;
    fn one() -> Self;
    fn pi() -> Self;
    /// Unit roundoff scale of this precision (2^-52 / 2^-104).
    fn epsilon() -> Self;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan2(self, other: Self) -> Self;
    fn is_finite(self) -> bool;

    fn half_pi() -> Self {
        Self::pi() / Self::from_f64(2.0)
    }

    /// acos via atan2; argument clamped to [-1, 1].
    fn acos(self) -> Self {
        let one = Self::one();
        let x = if self > one {
            one
        } else if self < -one {
            -one
        } else {
            self
        };
        ((one - x * x).sqrt()).atan2(x)
    }

    fn asin(self) -> Self {
        let one = Self::one();
        let x = if self > one {
            one
        } else if self < -one {
            -one
        } else {
            self
        };
        x.atan2((one - x * x).sqrt())
    }

    fn max(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }

    fn min(self, other: Self) -> Self {
        if self < other {
            self
        } else {
            other
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn atan2(self, other: Self) -> Self {
        f64::atan2(self, other)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

/// Which scalar backs a run. Carried in configs and output headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    F64,
    #[default]
    Dd,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::F64 => "f64",
            Precision::Dd => "dd",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" | "double" | "standard" => Ok(Precision::F64),
            "dd" | "double-double" | "extended" => Ok(Precision::Dd),
            other => Err(format!("unknown precision '{other}' (expected f64 or dd)")),
        }
    }
}
