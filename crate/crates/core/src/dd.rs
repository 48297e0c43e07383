//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s
//! carrying roughly 106 bits of significand.
//!
//! The algorithms follow the classic error-free transformations (Knuth's
//! two-sum, Dekker's split product). Only the operations the operator
//! construction and the convolution checks need are provided.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

/// A double-double number.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

const LN2: Dd = Dd {
    hi: 6.931_471_805_599_452_862e-1,
    lo: 2.319_046_813_846_299_558e-17,
};

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

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
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// 2^-104, the unit roundoff of the format.
    pub const EPSILON: f64 = 4.930_380_657_631_324e-32;

    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact for |x| < 2^106.
    pub fn from_i128(x: i128) -> Self {
        let hi = x as f64;
        let rest = x - hi as i128;
        let (hi, lo) = quick_two_sum(hi, rest as f64);
        Dd { hi, lo }
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

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Dd { hi, lo }
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Dd::from_f64(q1).mul_f64(b);
        let q2 = r.hi / b;
        let r = r - Dd::from_f64(q2).mul_f64(b);
        let q3 = r.hi / b;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd::from_f64(q3)
    }

    fn ldexp(self, exp: i32) -> Self {
        Dd {
            hi: libm::scalbn(self.hi, exp),
            lo: libm::scalbn(self.lo, exp),
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::ZERO } else { Dd::from_f64(f64::NAN) };
        }
        let x = 1.0 / libm::sqrt(self.hi);
        let ax = self.hi * x;
        let correction = (self - Dd::from_f64(ax).sqr()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax, correction);
        Dd { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.7 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        // exp(x) = 2^k * (1 + s)^(2^9), with |r| <= ln2/1024
        let k = libm::floor(self.hi / LN2.hi + 0.5);
        let r = (self - LN2.mul_f64(k)).ldexp(-9);

        let threshold = Dd::EPSILON * 1e-3;
        let mut s = r + r.sqr().mul_f64(0.5);
        let mut power = r.sqr().mul_f64(0.5);
        let mut n = 2.0;
        loop {
            n += 1.0;
            power = (power * r).div_f64(n);
            s += power;
            if libm::fabs(power.hi) <= threshold || n > 30.0 {
                break;
            }
        }
        for _ in 0..9 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    pub fn trunc(self) -> Self {
        let hi = libm::trunc(self.hi);
        if hi == self.hi {
            // hi is integral; the fractional part lives in lo
            let lo = if self.hi >= 0.0 {
                libm::floor(self.lo)
            } else {
                libm::ceil(self.lo)
            };
            let (hi, lo) = quick_two_sum(hi, lo);
            Dd { hi, lo }
        } else {
            Dd::from_f64(hi)
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p1, p2 + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        self - (self / b).trunc() * b
    }
}

macro_rules! forward_assign {
    ($($tr:ident $method:ident $op:tt),*) => {
        $(impl $tr for Dd {
            fn $method(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        })*
    };
}

forward_assign!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Zero for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = num_traits::ParseFloatError;

    // Parses through f64; only used by generic numeric plumbing.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Dd::from_f64)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}
