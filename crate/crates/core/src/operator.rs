//! Assembly of the discrete operator
//!
//! ```text
//! D(β) = (1/p) Σ_k A_k λ_k^{|β|−1}          |β| ≥ 2
//! D(±1) = (−2e^h + Σ_k A_k) / p
//! D(0)  = (2C + Σ_k A_k/λ_k) / p
//! ```
//!
//! and of the fundamental solution `ψ_m` it inverts.

use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Zero;

use crate::char_poly::{build_characteristic_polynomial, CharPoly, OperatorSpec};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::sinh_tail;
use crate::spectrum::{derivative_at, spectrum, Spectrum};

/// Relative size of an imaginary part still accepted as rounding noise.
pub const REALNESS_TOLERANCE: f64 = 1e-10;
/// `|P′(λ_k)|` below this fraction of the largest coefficient is rejected.
pub const SIMPLE_ROOT_THRESHOLD: f64 = 1e-10;

/// One `A_k λ_k^{|β|−1}` contribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term<R> {
    pub amplitude: Complex<R>,
    pub root: Complex<R>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteOperator<R> {
    spec: OperatorSpec,
    p: R,
    c: R,
    terms: Vec<Term<R>>,
    value_at_one: R,
    value_at_zero: R,
}

fn norm<R: Real>(z: Complex<R>) -> R {
    z.re.hypot(z.im)
}

fn real_part<R: Real>(z: Complex<R>) -> Result<R> {
    let magnitude = norm(z);
    if z.im.abs() > R::from_f64(REALNESS_TOLERANCE) * magnitude {
        return Err(Error::NotReal {
            imag: z.im.to_f64(),
            magnitude: magnitude.to_f64(),
        });
    }
    Ok(z.re)
}

fn lift<R: Real>(x: R) -> Complex<R> {
    Complex::new(x, R::zero())
}

/// `λ(e^{2h}+1) − e^h(λ²+1)`, written as `−e^h((1−λ)² − 4λ sinh²(h/2))` so
/// that it stays accurate for small `h`.
fn root_factor<R: Real>(lambda: Complex<R>, h: R) -> Complex<R> {
    let e = h.exp();
    let half = (h / R::from_f64(2.0)).sinh();
    let one_minus = lift(R::one()) - lambda;
    -(one_minus * one_minus - lambda * lift(R::from_f64(4.0) * half * half)) * lift(e)
}

/// `A_k = 2(1−λ_k)^{2m−2}[λ_k(e^{2h}+1) − e^h(λ_k²+1)]·p / (λ_k P′(λ_k))`,
/// one per interior root, in spectrum order.
pub fn amplitude_coefficients<R: Real>(cp: &CharPoly<R>, sp: &Spectrum<R>) -> Result<Vec<Complex<R>>> {
    let spec = cp.spec();
    let h = R::from_f64(spec.h());
    let threshold = R::from_f64(SIMPLE_ROOT_THRESHOLD) * cp.poly().max_abs_coeff();
    let two_p = lift(R::from_f64(2.0) * cp.p());

    let amplitudes = sp
        .interior()
        .iter()
        .map(|&lambda| {
            let d = derivative_at(cp, lambda);
            if norm(d) <= threshold {
                return Err(Error::NearMultipleRoot {
                    derivative: norm(d).to_f64(),
                });
            }
            let damp = crate::real::powu(lift(R::one()) - lambda, spec.degree() as u64);
            Ok(two_p * damp * root_factor(lambda, h) / (lambda * d))
        })
        .collect::<Result<Vec<_>>>()?;

    check_conjugate_closure(sp.interior(), &amplitudes)?;
    Ok(amplitudes)
}

/// Conjugate roots must carry conjugate amplitudes, or the assembled values
/// cannot be real.
fn check_conjugate_closure<R: Real>(roots: &[Complex<R>], amplitudes: &[Complex<R>]) -> Result<()> {
    for (k, root) in roots.iter().enumerate() {
        if root.im.is_zero() {
            real_part(amplitudes[k])?;
            continue;
        }
        let partner = roots
            .iter()
            .position(|z| *z == root.conj())
            .ok_or(Error::Malformed("complex root without its conjugate"))?;
        let diff = norm(amplitudes[partner] - amplitudes[k].conj());
        if diff > R::from_f64(REALNESS_TOLERANCE) * norm(amplitudes[k]) {
            return Err(Error::NotReal {
                imag: diff.to_f64(),
                magnitude: norm(amplitudes[k]).to_f64(),
            });
        }
    }
    Ok(())
}

/// `C = 1 + (2m−2)e^h + e^{2h} + e^h·p_second/p`.
pub fn boundary_constant<R: Real>(cp: &CharPoly<R>) -> R {
    let spec = cp.spec();
    let e = R::from_f64(spec.h()).exp();
    R::one() + R::from_i128(spec.degree() as i128) * e + e * e + e * cp.p_second() / cp.p()
}

/// Builds the operator for `spec` in the precision `R`.
pub fn construct<R: Real>(spec: &OperatorSpec) -> Result<DiscreteOperator<R>> {
    let cp = build_characteristic_polynomial::<R>(spec)?;
    let c = boundary_constant(&cp);
    if spec.m() == 1 {
        return DiscreteOperator::from_parts(*spec, cp.p(), c, Vec::new(), Vec::new());
    }
    let sp = spectrum(&cp)?;
    let amplitudes = amplitude_coefficients(&cp, &sp)?;
    DiscreteOperator::from_parts(*spec, cp.p(), c, sp.interior().to_vec(), amplitudes)
}

impl<R: Real> DiscreteOperator<R> {
    /// Reassembles an operator from its defining constants, recomputing the
    /// `β = 0` and `|β| = 1` values.
    pub fn from_parts(
        spec: OperatorSpec,
        p: R,
        c: R,
        roots: Vec<Complex<R>>,
        amplitudes: Vec<Complex<R>>,
    ) -> Result<Self> {
        if roots.len() != spec.m() - 1 || amplitudes.len() != roots.len() {
            return Err(Error::Malformed("expected m − 1 roots and amplitudes"));
        }
        if p.is_zero() || roots.iter().any(|z| z.is_zero()) {
            return Err(Error::Malformed("zero leading coefficient or root"));
        }
        let terms: Vec<Term<R>> = roots
            .into_iter()
            .zip(amplitudes)
            .map(|(root, amplitude)| Term { amplitude, root })
            .collect();
        let e = R::from_f64(spec.h()).exp();
        let sum_a = terms.iter().fold(Complex::<R>::zero(), |acc, t| acc + t.amplitude);
        let sum_a_over = terms
            .iter()
            .fold(Complex::<R>::zero(), |acc, t| acc + t.amplitude / t.root);
        let value_at_one = real_part((sum_a - lift(R::from_f64(2.0) * e)) / lift(p))?;
        let value_at_zero = real_part((sum_a_over + lift(R::from_f64(2.0) * c)) / lift(p))?;
        Ok(DiscreteOperator {
            spec,
            p,
            c,
            terms,
            value_at_one,
            value_at_zero,
        })
    }

    pub fn spec(&self) -> OperatorSpec {
        self.spec
    }

    pub fn p(&self) -> R {
        self.p
    }

    pub fn c(&self) -> R {
        self.c
    }

    pub fn terms(&self) -> &[Term<R>] {
        &self.terms
    }

    pub fn roots(&self) -> Vec<Complex<R>> {
        self.terms.iter().map(|t| t.root).collect()
    }

    pub fn amplitudes(&self) -> Vec<Complex<R>> {
        self.terms.iter().map(|t| t.amplitude).collect()
    }

    pub fn value_at_one(&self) -> R {
        self.value_at_one
    }

    pub fn value_at_zero(&self) -> R {
        self.value_at_zero
    }

    /// `max |λ_k| e^h`; 0 when there are no roots.
    pub fn convergence_ratio(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| norm(t.root).to_f64())
            .fold(0.0, f64::max)
            * libm::exp(self.spec.h())
    }

    /// `D(hβ)` with its (rounding-level) imaginary part kept.
    pub fn evaluate_complex(&self, beta: i64) -> Complex<R> {
        match beta.unsigned_abs() {
            0 => lift(self.value_at_zero),
            1 => lift(self.value_at_one),
            b => {
                let sum = self.terms.iter().fold(Complex::<R>::zero(), |acc, t| {
                    acc + t.amplitude * crate::real::powu(t.root, b - 1)
                });
                sum / lift(self.p)
            }
        }
    }

    /// `D(hβ)`.
    pub fn evaluate(&self, beta: i64) -> R {
        self.evaluate_complex(beta).re
    }

    /// The same operator with `A_k` multiplied by `factor` (and `D(0)`,
    /// `D(±1)` recomputed). Used to show the identities are sensitive.
    pub fn with_scaled_amplitude(&self, k: usize, factor: R) -> Result<Self> {
        let mut amplitudes = self.amplitudes();
        let a = amplitudes
            .get_mut(k)
            .ok_or(Error::Malformed("amplitude index out of range"))?;
        *a = *a * lift(factor);
        Self::from_parts(self.spec, self.p, self.c, self.roots(), amplitudes)
    }

    /// Rounds every constant to `f64` and reassembles.
    pub fn to_f64(&self) -> Result<DiscreteOperator<f64>> {
        let round = |z: Complex<R>| Complex::new(z.re.to_f64(), z.im.to_f64());
        DiscreteOperator::from_parts(
            self.spec,
            self.p.to_f64(),
            self.c.to_f64(),
            self.terms.iter().map(|t| round(t.root)).collect(),
            self.terms.iter().map(|t| round(t.amplitude)).collect(),
        )
    }
}

/// `ψ_m(x) = (sign x / 2)(sinh x − Σ_{k=1}^{m−1} x^{2k−1}/(2k−1)!)`, the
/// fundamental solution of `d²ᵐ/dx²ᵐ − d²ᵐ⁻²/dx²ᵐ⁻²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FundamentalSolution {
    m: usize,
}

impl FundamentalSolution {
    pub fn new(spec: &OperatorSpec) -> Self {
        FundamentalSolution { m: spec.m() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Below this `|x|` the tail series is used; above it the closed form
    /// loses less than a digit.
    pub fn switchover(&self) -> f64 {
        (2 * self.m) as f64
    }

    pub fn eval<R: Real>(&self, x: R) -> R {
        let y = x.abs();
        if y.to_f64() < self.switchover() {
            self.by_series(y)
        } else {
            self.closed_form(y)
        }
    }

    /// `½ Σ_{k≥m} |x|^{2k−1}/(2k−1)!`; every term is positive.
    pub fn by_series<R: Real>(&self, x: R) -> R {
        sinh_tail(x.abs(), self.m) / R::from_f64(2.0)
    }

    /// `½ (sinh|x| − Σ_{k<m} |x|^{2k−1}/(2k−1)!)` as written.
    pub fn closed_form<R: Real>(&self, x: R) -> R {
        let y = x.abs();
        let mut acc = y.sinh();
        let mut term = y;
        for k in 1..self.m {
            acc -= term;
            term = term * y * y / R::from_i128(((2 * k) * (2 * k + 1)) as i128);
        }
        acc / R::from_f64(2.0)
    }
}

/// `ψ_m(x)` for the order in `spec`.
pub fn fundamental_solution<R: Real>(spec: &OperatorSpec, x: R) -> R {
    FundamentalSolution::new(spec).eval(x)
}
