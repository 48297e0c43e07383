//! Dense univariate polynomials, lowest degree first.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::real::Real;

/// `coeffs[i]` is the coefficient of `x^i`. Trailing zeros are never stored,
/// except that the zero polynomial keeps a single `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Copy + Zero + PartialEq> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> T {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn map<U, F>(&self, f: F) -> Polynomial<U>
    where
        U: Copy + Zero + PartialEq,
        F: FnMut(&T) -> U,
    {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T> Polynomial<T>
where
    T: Copy + Zero + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn pow(&self, n: u32) -> Self
    where
        T: num_traits::One,
    {
        let mut acc = Self::constant(T::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl<T: Copy + Zero + PartialEq> Polynomial<T> {
    /// True when `coeff(i) == coeff(deg - i)` exactly.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }
}

impl<R: Real> Polynomial<R> {
    pub fn from_integers(coeffs: &[i128]) -> Self {
        Self::new(coeffs.iter().map(|&c| R::from_i128(c)).collect())
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: Complex<R>) -> Complex<R> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(R::zero(), R::zero()), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * R::from_i128(i as i128))
                .collect(),
        )
    }

    /// Value of the derivative at a complex point, without materializing it.
    pub fn derivative_at(&self, z: Complex<R>) -> Complex<R> {
        let zero = Complex::new(R::zero(), R::zero());
        let mut acc = zero;
        for (i, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * R::from_i128(i as i128);
        }
        acc
    }

    /// `sum_i |c_i| |z|^i`, the natural scale for backward errors at `z`.
    pub fn abs_eval(&self, r: R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, &c| acc * r + c.abs())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> R {
        self.coeffs.iter().fold(R::zero(), |m, &c| m.max(c.abs()))
    }
}

impl<'a, T> Add for &'a Polynomial<T>
where
    T: Copy + Zero + PartialEq + Add<Output = T>,
{
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeff(i) + rhs.coeff(i))
                .collect(),
        )
    }
}

impl<'a, T> Sub for &'a Polynomial<T>
where
    T: Copy + Zero + PartialEq + Sub<Output = T>,
{
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| self.coeff(i) - rhs.coeff(i))
                .collect(),
        )
    }
}

impl<'a, T> Mul for &'a Polynomial<T>
where
    T: Copy + Zero + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// `(1 - x)^n` with integer coefficients.
pub fn one_minus_x_pow(n: u32) -> Polynomial<i128> {
    Polynomial::new(vec![1i128, -1]).pow(n)
}
