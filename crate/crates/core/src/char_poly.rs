//! The characteristic polynomial `P(λ)` of degree `2m − 2` whose roots
//! inside the unit disk parameterize the discrete operator.
//!
//! Written out directly,
//!
//! ```text
//! P(λ) = (1 − e^{2h})(1 − λ)^{2m−2}
//!        − 2(λ(e^{2h} + 1) − e^h(λ² + 1)) Σ_{j=1}^{m−1} h^{2j−1}/(2j−1)! (1 − λ)^{2m−2−2j} E_{2j−2}(λ)
//! ```
//!
//! Expanding that literally cancels about `(2m−2)·log10(1/h)` digits for
//! small `h`. Using `λ(e^{2h}+1) − e^h(λ²+1) = −e^h((1−λ)² − 2λ(cosh h − 1))`
//! and collecting powers of `h` instead gives
//!
//! ```text
//! P(λ) = −2e^h [ s_m(h) (1 − λ)^{2m−2} + 2λ Σ_j h^{2j−1}/(2j−1)! · c_{m−j}(h) · (1 − λ)^{2m−2−2j} E_{2j−2}(λ) ]
//! ```
//!
//! where `s_m(h) = Σ_{i≥m} h^{2i−1}/(2i−1)!` and `c_r(h) = Σ_{i≥r} h^{2i}/(2i)!`.
//! Both weights are positive series and every polynomial factor has exact
//! integer coefficients, so nothing cancels as `h → 0`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::poly::{one_minus_x_pow, Polynomial};
use crate::real::Real;
use crate::special::{damped_euler, sinh_tail};

/// Largest operator order accepted by the default guard.
pub const MAX_ORDER: usize = 6;
/// Largest operator order accepted with [`Guard::Unsafe`].
pub const UNSAFE_MAX_ORDER: usize = 8;
/// Default admissible step range.
pub const MIN_STEP: f64 = 1e-3;
pub const MAX_STEP: f64 = 5.0;
/// Step range with [`Guard::Unsafe`]; `e^{2h}` must stay finite.
pub const UNSAFE_MIN_STEP: f64 = 1e-6;
pub const UNSAFE_MAX_STEP: f64 = 300.0;

/// Which parameter ranges [`OperatorSpec`] accepts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Guard {
    #[default]
    Standard,
    /// Wider ranges where root finding and the identities are not vetted.
    Unsafe,
}

impl Guard {
    pub fn max_order(self) -> usize {
        match self {
            Guard::Standard => MAX_ORDER,
            Guard::Unsafe => UNSAFE_MAX_ORDER,
        }
    }

    pub fn step_range(self) -> (f64, f64) {
        match self {
            Guard::Standard => (MIN_STEP, MAX_STEP),
            Guard::Unsafe => (UNSAFE_MIN_STEP, UNSAFE_MAX_STEP),
        }
    }
}

/// Operator order `m` and grid step `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorSpec {
    m: usize,
    h: f64,
}

impl OperatorSpec {
    pub fn new(m: usize, h: f64) -> Result<Self> {
        Self::with_guard(m, h, Guard::Standard)
    }

    pub fn with_guard(m: usize, h: f64, guard: Guard) -> Result<Self> {
        let max = guard.max_order();
        if m == 0 || m > max {
            return Err(Error::OrderOutOfRange { m, max });
        }
        let (min_h, max_h) = guard.step_range();
        if !(h >= min_h && h <= max_h) {
            return Err(Error::StepOutOfRange {
                h,
                min: min_h,
                max: max_h,
            });
        }
        Ok(OperatorSpec { m, h })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Degree `2m − 2` of the characteristic polynomial.
    pub fn degree(&self) -> usize {
        2 * self.m - 2
    }
}

/// `P(λ)` together with the coefficients the operator needs.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly<R> {
    spec: OperatorSpec,
    poly: Polynomial<R>,
    p: R,
    p_second: R,
}

impl<R: Real> CharPoly<R> {
    pub fn spec(&self) -> OperatorSpec {
        self.spec
    }

    pub fn poly(&self) -> &Polynomial<R> {
        &self.poly
    }

    /// Leading coefficient, equal to the constant term.
    pub fn p(&self) -> R {
        self.p
    }

    /// Coefficient of `λ^{2m−3}`; zero when `m = 1`.
    pub fn p_second(&self) -> R {
        self.p_second
    }

    /// The same roots with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: R) -> Self {
        CharPoly {
            spec: self.spec,
            poly: self.poly.map(|&c| c * factor),
            p: self.p * factor,
            p_second: self.p_second * factor,
        }
    }
}

/// `Σ_{i≥r} x^{2i}/(2i)!` for `r ≥ 1`, summed directly.
fn cosh_tail<R: Real>(x: R, r: usize) -> R {
    let x2 = x * x;
    let mut term = R::one();
    for n in 1..=(2 * r) {
        term = term * x / R::from_i128(n as i128);
    }
    let mut sum = R::zero();
    let mut n = 2 * r;
    loop {
        sum += term;
        if term.abs() <= sum.abs() * R::from_f64(R::EPSILON * 0.25) || n > 4000 {
            return sum;
        }
        term = term * x2 / R::from_i128(((n + 1) * (n + 2)) as i128);
        n += 2;
    }
}

/// `p = (1 − e^{2h}) + 2e^h Σ_{j=1}^{m−1} h^{2j−1}/(2j−1)!`, evaluated as the
/// equivalent `−2e^h Σ_{j≥m} h^{2j−1}/(2j−1)!`.
pub fn leading_coefficient<R: Real>(spec: &OperatorSpec) -> R {
    let h = R::from_f64(spec.h());
    R::from_f64(-2.0) * h.exp() * sinh_tail(h, spec.m())
}

pub fn build_characteristic_polynomial<R: Real>(spec: &OperatorSpec) -> Result<CharPoly<R>> {
    let m = spec.m();
    let h = R::from_f64(spec.h());
    let e = h.exp();
    let deg = spec.degree();

    let to_real = |p: &Polynomial<i128>| -> Vec<R> { p.coeffs().iter().map(|&c| R::from_i128(c)).collect() };

    let mut acc: Vec<R> = to_real(&one_minus_x_pow(deg as u32))
        .into_iter()
        .map(|c| c * sinh_tail(h, m))
        .collect();
    acc.resize(deg + 1, R::zero());

    let mut h_odd = h; // h^{2j−1}/(2j−1)!
    for j in 1..m {
        if j > 1 {
            let k = (2 * j - 2) as i128;
            h_odd = h_odd * h * h / R::from_i128(k * (k + 1));
        }
        let weight = R::from_f64(2.0) * h_odd * cosh_tail(h, m - j);
        let b = damped_euler((2 * m - 2 - 2 * j) as u32, 2 * j - 2)?;
        // λ·B_j(λ): shift by one
        for (i, c) in to_real(&b).into_iter().enumerate() {
            acc[i + 1] += weight * c;
        }
    }
    let scale = R::from_f64(-2.0) * e;
    let poly = Polynomial::new(acc.into_iter().map(|c| c * scale).collect());

    let p = leading_coefficient::<R>(spec);
    let p_second = if m == 1 { R::zero() } else { poly.coeff(deg - 1) };
    Ok(CharPoly {
        spec: *spec,
        poly,
        p,
        p_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use crate::poly::Polynomial;
    use crate::special::euler_polynomial;

    /// Term-by-term expansion of the defining formula, in double-double.
    /// Also returns the largest summand magnitude, which bounds the
    /// oracle's own rounding error.
    fn literal_expansion(m: usize, h: f64) -> (Polynomial<Dd>, f64) {
        let h = Dd::from_f64(h);
        let e = h.exp();
        let e2 = e * e;
        let one = Dd::ONE;
        let deg = (2 * m - 2) as u32;
        let lift = |p: &Polynomial<i128>| -> Polynomial<Dd> { Polynomial::from_integers(p.coeffs()) };
        let abs = |p: &Polynomial<Dd>| p.map(|c| c.abs());
        let first = lift(&one_minus_x_pow(deg)).scale(one - e2);
        // λ(e^{2h}+1) − e^h(λ²+1)
        let quad = Polynomial::new(alloc::vec![-e, e2 + one, -e]);
        let mut bracket = Polynomial::zero();
        let mut bracket_abs = Polynomial::zero();
        let mut fact = Dd::ONE;
        for j in 1..m {
            let n = 2 * j - 1;
            if n > 1 {
                fact = fact * Dd::from_f64(((n - 1) * n) as f64);
            }
            let w = h.powi(n as u32) / fact;
            let b = &lift(&one_minus_x_pow(deg - 2 * j as u32)) * &lift(&euler_polynomial(2 * j - 2).unwrap());
            bracket = &bracket + &b.scale(w);
            bracket_abs = &bracket_abs + &abs(&b).scale(w);
        }
        let two = Dd::from_f64(2.0);
        let poly = &first - &(&quad * &bracket).scale(two);
        let magnitude = (&abs(&first) + &(&abs(&quad) * &bracket_abs).scale(two)).max_abs_coeff();
        (poly, magnitude.to_f64())
    }

    fn grid() -> impl Iterator<Item = (usize, f64)> {
        (1..=6).flat_map(|m| [0.05, 0.1, 0.3, 0.5, 1.0].into_iter().map(move |h| (m, h)))
    }

    #[test]
    fn guard_rejects_out_of_range() {
        assert_eq!(OperatorSpec::new(0, 1.0), Err(Error::OrderOutOfRange { m: 0, max: 6 }));
        assert_eq!(OperatorSpec::new(7, 0.5), Err(Error::OrderOutOfRange { m: 7, max: 6 }));
        assert!(OperatorSpec::new(2, 0.0).is_err());
        assert!(OperatorSpec::new(2, f64::NAN).is_err());
        assert!(OperatorSpec::new(2, 5.5).is_err());
        assert!(OperatorSpec::with_guard(7, 0.5, Guard::Unsafe).is_ok());
        assert!(OperatorSpec::with_guard(2, 50.0, Guard::Unsafe).is_ok());
    }

    #[test]
    fn order_one_is_constant() {
        for &h in &[0.1, 1.0] {
            let cp = build_characteristic_polynomial::<f64>(&OperatorSpec::new(1, h).unwrap()).unwrap();
            assert_eq!(cp.poly().degree(), 0);
            let expected = 1.0 - libm::exp(2.0 * h);
            assert!((cp.poly().coeff(0) - expected).abs() < 1e-14 * expected.abs());
            assert_eq!(cp.p_second(), 0.0);
            assert!(cp.p() < 0.0);
        }
    }

    #[test]
    fn order_two_hand_expansion() {
        let h: f64 = 0.5;
        let e = libm::exp(h);
        let e2 = e * e;
        let outer = (1.0 - e2) + 2.0 * h * e;
        let middle = -2.0 * (1.0 - e2) - 2.0 * h * (e2 + 1.0);
        let cp = build_characteristic_polynomial::<f64>(&OperatorSpec::new(2, h).unwrap()).unwrap();
        let c = cp.poly().coeffs();
        assert_eq!(c.len(), 3);
        for (got, want) in c.iter().zip([outer, middle, outer]) {
            assert!((got - want).abs() < 1e-12 * want.abs(), "{got} vs {want}");
        }
    }

    #[test]
    fn series_form_matches_literal_expansion() {
        for (m, h) in grid() {
            let spec = OperatorSpec::new(m, h).unwrap();
            let (oracle, magnitude) = literal_expansion(m, h);
            let dd = build_characteristic_polynomial::<Dd>(&spec).unwrap();
            let f = build_characteristic_polynomial::<f64>(&spec).unwrap();
            let scale = oracle.max_abs_coeff().to_f64();
            // the oracle cancels down from summands of size `magnitude`
            let oracle_floor = 64.0 * Dd::EPSILON * magnitude / scale;
            assert_eq!(dd.poly().degree(), 2 * m - 2);
            for i in 0..=2 * m - 2 {
                let want = oracle.coeff(i);
                let dd_err = (dd.poly().coeff(i) - want).abs().to_f64() / scale;
                assert!(dd_err < oracle_floor, "m={m} h={h} i={i}: {dd_err:e}");
                let f_err = (f.poly().coeff(i) - want.to_f64()).abs() / scale;
                assert!(f_err < 1e-13, "m={m} h={h} i={i}: {f_err:e}");
            }
        }
    }

    #[test]
    fn order_three_at_point_three() {
        let spec = OperatorSpec::new(3, 0.3).unwrap();
        let (oracle, _) = literal_expansion(3, 0.3);
        let cp = build_characteristic_polynomial::<f64>(&spec).unwrap();
        for i in 0..=4 {
            let want = oracle.coeff(i).to_f64();
            assert!((cp.poly().coeff(i) - want).abs() < 1e-12 * want.abs(), "i = {i}");
        }
    }

    #[test]
    fn self_reciprocal_and_end_coefficients() {
        for (m, h) in grid() {
            let cp = build_characteristic_polynomial::<f64>(&OperatorSpec::new(m, h).unwrap()).unwrap();
            let c = cp.poly().coeffs();
            let n = c.len();
            let scale = cp.poly().max_abs_coeff();
            for s in 0..n {
                assert!((c[s] - c[n - 1 - s]).abs() <= 1e-12 * scale, "m={m} h={h} s={s}");
            }
            let p = cp.p();
            assert!((c[0] - p).abs() <= 1e-12 * p.abs());
            assert!((c[n - 1] - p).abs() <= 1e-12 * p.abs());
            assert!(p != 0.0 && p < 0.0);
            // λ = 1 is never a root
            assert!(cp.poly().eval(1.0).abs() > 1e-6 * cp.poly().abs_eval(1.0));
        }
    }

    #[test]
    fn leading_coefficient_examples() {
        let e = core::f64::consts::E;
        let p1: f64 = leading_coefficient(&OperatorSpec::new(1, 1.0).unwrap());
        assert!((p1 - (1.0 - e * e)).abs() < 1e-14 * p1.abs());

        let p2: f64 = leading_coefficient(&OperatorSpec::new(2, 0.5).unwrap());
        let want = (1.0 - e) + 2.0 * libm::exp(0.5) * 0.5;
        assert!((p2 - want).abs() < 1e-12 * want.abs());

        // this one cancels ~4 digits literally, so compare in double-double
        let p3: Dd = leading_coefficient(&OperatorSpec::new(3, 0.1).unwrap());
        let h = Dd::from_f64(0.1);
        let want = (Dd::ONE - (h + h).exp()) + Dd::from_f64(2.0) * h.exp() * (h + h.powi(3) / Dd::from_f64(6.0));
        assert!(((p3 - want) / want).abs().to_f64() < 1e-24);
    }

    #[test]
    fn value_at_one_matches_factored_form() {
        // P(1) = −2(e^h − 1)² Σ_j h^{2j−1}/(2j−1)! E_{2j−2}(1)[j = m−1]
        for (m, h) in grid().filter(|&(m, _)| m >= 2) {
            let cp = build_characteristic_polynomial::<f64>(&OperatorSpec::new(m, h).unwrap()).unwrap();
            let j = m - 1;
            let n = 2 * j - 1;
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let euler_at_one: f64 = (1..=(2 * j - 1)).map(|k| k as f64).product();
            let want = -2.0 * libm::expm1(h).powi(2) * h.powi(n as i32) / fact * euler_at_one;
            let got = cp.poly().eval(1.0);
            assert!((got - want).abs() < 1e-9 * want.abs(), "m={m} h={h}: {got} vs {want}");
        }
    }

    #[test]
    fn scaling_keeps_structure() {
        let cp = build_characteristic_polynomial::<f64>(&OperatorSpec::new(3, 0.3).unwrap()).unwrap();
        let s = cp.scaled(2.0);
        assert_eq!(s.p(), 2.0 * cp.p());
        assert_eq!(s.poly().coeff(2), 2.0 * cp.poly().coeff(2));
    }
}
