//! Scalar abstractions shared by every module.
//!
//! [`Real`] is the real field the operator is built over (`f64` or [`Dd`]);
//! [`Scalar`] additionally covers `Complex<R>` so that power sums can be
//! evaluated at complex roots with the same code.

use core::fmt::{Debug, Display};
use core::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::Num;

use crate::dd::Dd;

pub trait Real:
    Copy
    + Debug
    + Display
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Unit roundoff.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn from_i128(x: i128) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;

    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }

    fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    fn sinh(self) -> Self {
        let e = self.exp();
        (e - Self::one() / e) / Self::from_f64(2.0)
    }

    fn cosh(self) -> Self {
        let e = self.exp();
        (e + Self::one() / e) / Self::from_f64(2.0)
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON / 2.0;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn from_i128(x: i128) -> Self {
        x as f64
    }
    fn abs(self) -> Self {
        libm::fabs(self)
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn hypot(self, other: Self) -> Self {
        libm::hypot(self, other)
    }
    fn sinh(self) -> Self {
        libm::sinh(self)
    }
    fn cosh(self) -> Self {
        libm::cosh(self)
    }
}

impl Real for Dd {
    const EPSILON: f64 = Dd::EPSILON;

    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn from_i128(x: i128) -> Self {
        Dd::from_i128(x)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
}

/// A real or complex number over the real field `R`.
pub trait Scalar: Copy + Debug + Num + Neg<Output = Self> + Send + Sync + 'static {
    type Real: Real;

    fn from_real(r: Self::Real) -> Self;
    fn modulus(self) -> Self::Real;
}

impl<R: Real> Scalar for Complex<R> {
    type Real = R;

    fn from_real(r: R) -> Self {
        Complex::new(r, R::zero())
    }
    fn modulus(self) -> R {
        self.re.hypot(self.im)
    }
}

macro_rules! real_scalar {
    ($($t:ty),*) => {
        $(impl Scalar for $t {
            type Real = $t;

            fn from_real(r: $t) -> Self {
                r
            }
            fn modulus(self) -> $t {
                Real::abs(self)
            }
        })*
    };
}

real_scalar!(f64, Dd);

/// Integer power by repeated squaring for any scalar.
pub fn powu<S: Scalar>(base: S, n: u64) -> S {
    let mut b = base;
    let mut acc = S::one();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        e >>= 1;
    }
    acc
}

/// Converts a complex number between real fields by way of `f64`.
pub fn complex_to<R: Real, T: Real>(z: Complex<R>) -> Complex<T> {
    Complex::new(T::from_f64(z.re.to_f64()), T::from_f64(z.im.to_f64()))
}
