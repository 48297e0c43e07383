//! Forward differences of powers at zero, Eulerian (Euler–Frobenius)
//! polynomials and closed forms for power-weighted geometric sums.
//!
//! `Δⁱ0ᵏ` is the i-th forward difference of `γ ↦ γᵏ` at `γ = 0`; it equals
//! `i!·S(k, i)` with `S` the Stirling numbers of the second kind. Tables are
//! kept as exact integers, and `0⁰ = 1` throughout.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{one_minus_x_pow, Polynomial};
use crate::real::{powu, Real, Scalar};

/// Default cap on the power `k` of a difference table.
pub const DEFAULT_MAX_POWER: usize = 12;

/// Highest Euler polynomial degree served by [`euler_polynomial`].
pub const EULER_MAX_DEGREE: usize = 12;

/// Tables are computed in `i128` and stored as `u64`; beyond this the
/// largest entries no longer fit.
const HARD_MAX_POWER: usize = 16;

/// Row `k` of the `Δⁱ0ᵏ` table, `i = 0..=k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceTable {
    k: usize,
    values: Vec<u64>,
}

impl DifferenceTable {
    pub fn power(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// `Δⁱ0ᵏ`; zero for `i > k`.
    pub fn get(&self, i: usize) -> u64 {
        self.values.get(i).copied().unwrap_or(0)
    }
}

fn check_capacity(k: usize, max: usize) -> Result<()> {
    let max = max.min(HARD_MAX_POWER);
    if k > max {
        return Err(Error::Capacity { requested: k, max });
    }
    Ok(())
}

fn to_table(k: usize, row: Vec<i128>) -> Result<DifferenceTable> {
    let values = row
        .into_iter()
        .map(|v| u64::try_from(v).map_err(|_| Error::Capacity { requested: k, max: HARD_MAX_POWER }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DifferenceTable { k, values })
}

/// `Δⁱ0ᵏ` for `i = 0..=k` with the default capacity.
pub fn forward_differences_of_powers(k: usize) -> Result<DifferenceTable> {
    forward_differences_with_limit(k, DEFAULT_MAX_POWER)
}

/// Recurrence route: `Δⁱ0ᵏ = i·(Δⁱ⁻¹0ᵏ⁻¹ + Δⁱ0ᵏ⁻¹)`.
pub fn forward_differences_with_limit(k: usize, max: usize) -> Result<DifferenceTable> {
    check_capacity(k, max)?;
    let mut row: Vec<i128> = vec![1];
    for kk in 1..=k {
        let mut next = vec![0i128; kk + 1];
        for (i, slot) in next.iter_mut().enumerate().skip(1) {
            let prev = row[i - 1];
            let same = row.get(i).copied().unwrap_or(0);
            *slot = i as i128 * (prev + same);
        }
        row = next;
    }
    to_table(k, row)
}

/// Definition route: `Δⁱ0ᵏ = Σⱼ (−1)^(i−j) C(i, j) jᵏ`.
pub fn forward_differences_by_alternating_sum(k: usize, max: usize) -> Result<DifferenceTable> {
    check_capacity(k, max)?;
    let row = (0..=k)
        .map(|i| {
            let mut binom: i128 = 1;
            let mut acc: i128 = 0;
            for j in 0..=i {
                if j > 0 {
                    binom = binom * (i - j + 1) as i128 / j as i128;
                }
                let term = binom * (j as i128).pow(k as u32);
                if (i - j) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
        .collect();
    to_table(k, row)
}

/// The Euler polynomial `E_k(λ)` with integer coefficients, built from
/// `(λ−1)^(k+1) Σ_{i=1..k+1} Δⁱ0^(k+1) / (λ−1)ⁱ`.
pub fn euler_polynomial(k: usize) -> Result<Polynomial<i128>> {
    if k > EULER_MAX_DEGREE {
        return Err(Error::Capacity {
            requested: k,
            max: EULER_MAX_DEGREE,
        });
    }
    let table = forward_differences_with_limit(k + 1, EULER_MAX_DEGREE + 1)?;
    let x_minus_one = Polynomial::new(vec![-1i128, 1]);
    let mut acc = Polynomial::zero();
    for i in 1..=k + 1 {
        let term = x_minus_one.pow((k + 1 - i) as u32).scale(table.get(i) as i128);
        acc = &acc + &term;
    }
    Ok(acc)
}

/// Evaluates an integer polynomial at any scalar.
pub(crate) fn eval_int_poly<S: Scalar>(p: &Polynomial<i128>, x: S) -> S {
    p.coeffs()
        .iter()
        .rev()
        .fold(S::zero(), |acc, &c| acc * x + S::from_real(S::Real::from_i128(c)))
}

fn table_in<S: Scalar>(table: &DifferenceTable, i: usize) -> S {
    S::from_real(S::Real::from_i128(table.get(i) as i128))
}

/// `Σ_{γ≥0} q^γ γᵏ = (1/(1−q)) Σ_{i=0..k} (q/(1−q))ⁱ Δⁱ0ᵏ` for `|q| < 1`.
pub fn infinite_power_sum<S: Scalar>(q: S, k: usize) -> Result<S> {
    let modulus = q.modulus();
    if modulus >= S::Real::one() {
        return Err(Error::Divergent {
            ratio: modulus.to_f64(),
        });
    }
    let table = forward_differences_of_powers(k)?;
    let one_minus = S::one() - q;
    let ratio = q / one_minus;
    let sum = (0..=k)
        .rev()
        .fold(S::zero(), |acc, i| acc * ratio + table_in::<S>(&table, i));
    Ok(sum / one_minus)
}

/// `Σ_{γ=0..n−1} q^γ γᵏ` through the finite closed form: the infinite-sum
/// head minus `q^n/(1−q) Σᵢ (q/(1−q))ⁱ Δⁱγᵏ|_{γ=n}`. Valid for any `q ≠ 1`.
pub fn partial_power_sum<S: Scalar>(q: S, k: usize, n: u64) -> Result<S> {
    if q == S::one() {
        return Err(Error::Pole);
    }
    let tables = (0..=k)
        .map(forward_differences_of_powers)
        .collect::<Result<Vec<_>>>()?;
    let one_minus = S::one() - q;
    let ratio = q / one_minus;

    let head = (0..=k)
        .rev()
        .fold(S::zero(), |acc, i| acc * ratio + table_in::<S>(&tables[k], i));

    // Δⁱ(n+x)ᵏ at x = 0 = Σ_t C(k,t) n^(k−t) Δⁱ0ᵗ, all terms non-negative.
    let n_real = S::Real::from_i128(n as i128);
    let boundary_diff = |i: usize| -> S::Real {
        let mut binom: i128 = 1;
        let mut acc = S::Real::zero();
        for (t, table) in tables.iter().enumerate() {
            if t > 0 {
                binom = binom * (k - t + 1) as i128 / t as i128;
            }
            let d = table.get(i);
            if d != 0 {
                acc += S::Real::from_i128(binom * d as i128) * n_real.powi((k - t) as u32);
            }
        }
        acc
    };
    let boundary = (0..=k)
        .rev()
        .fold(S::zero(), |acc, i| acc * ratio + S::from_real(boundary_diff(i)));

    Ok((head - powu(q, n) * boundary) / one_minus)
}

/// `Σ_{γ≥1} λ^γ γ^(2j−1) = λ E_{2j−2}(λ) / (1−λ)^(2j)` for `|λ| < 1`, `j ≥ 1`.
pub fn weighted_odd_power_tail<S: Scalar>(lambda: S, j: usize) -> Result<S> {
    if j == 0 {
        return Err(Error::Malformed("odd power index j must be positive"));
    }
    let modulus = lambda.modulus();
    if modulus >= S::Real::one() {
        return Err(Error::Divergent {
            ratio: modulus.to_f64(),
        });
    }
    let euler = euler_polynomial(2 * j - 2)?;
    let denom = powu(S::one() - lambda, 2 * j as u64);
    Ok(lambda * eval_int_poly(&euler, lambda) / denom)
}

/// `Σ_{j≥m} x^(2j−1)/(2j−1)!`: the part of `sinh x` left after removing its
/// first `m−1` odd Taylor terms. Summed directly, so it keeps full relative
/// accuracy for small `x`.
pub fn sinh_tail<R: Real>(x: R, m: usize) -> R {
    let x2 = x * x;
    // first term x^(2m-1)/(2m-1)!
    let mut term = x;
    for n in 2..=(2 * m - 1) {
        term = term * x / R::from_i128(n as i128);
    }
    if m == 0 {
        unreachable!("operator order is at least 1");
    }
    let mut sum = R::zero();
    let mut n = 2 * m - 1;
    loop {
        sum += term;
        if term.abs() <= sum.abs() * R::from_f64(R::EPSILON * 0.25) || n > 4000 {
            break;
        }
        term = term * x2 / R::from_i128(((n + 1) * (n + 2)) as i128);
        n += 2;
    }
    sum
}

/// Binomial coefficient `C(n, k)` as `i128`.
pub(crate) fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `(1 − λ)^n · E_k(λ)` as an integer polynomial.
pub(crate) fn damped_euler(n: u32, k: usize) -> Result<Polynomial<i128>> {
    Ok(&one_minus_x_pow(n) * &euler_polynomial(k)?)
}
