//! Roots of the characteristic polynomial and their split into the interior
//! roots `|λ| < 1` and reciprocal exterior partners.
//!
//! Initial estimates come from the eigenvalues of the balanced companion
//! matrix (Francis double-shift QR in `f64`); each estimate is then polished
//! by Newton's method on the original coefficients in the working precision.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex;
use num_traits::Zero;

use crate::char_poly::CharPoly;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::real::Real;

/// Largest accepted backward error `|P(z)| / Σ|cᵢ||z|ⁱ` after polishing.
pub const BACKWARD_ERROR_LIMIT: f64 = 1e-8;
/// Default distance from the unit circle below which a root is rejected.
pub const UNIT_CIRCLE_MARGIN: f64 = 1e-8;

const MAX_QR_ITERATIONS: usize = 60;
const MAX_NEWTON_STEPS: usize = 60;

/// The interior roots and their reciprocal partners, in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<R> {
    interior: Vec<Complex<R>>,
    exterior: Vec<Complex<R>>,
    residual: f64,
}

impl<R: Real> Spectrum<R> {
    /// Sorted by descending modulus, then ascending argument.
    pub fn interior(&self) -> &[Complex<R>] {
        &self.interior
    }

    /// `exterior()[k]` is the partner of `interior()[k]`.
    pub fn exterior(&self) -> &[Complex<R>] {
        &self.exterior
    }

    /// Worst backward error over all roots; 0 when not measured.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `max |λ_k| e^h`: the series in the convolution identities converge
    /// only when this is below 1.
    pub fn convergence_ratio(&self, h: f64) -> f64 {
        self.interior
            .iter()
            .map(|z| modulus(*z).to_f64())
            .fold(0.0, f64::max)
            * libm::exp(h)
    }
}

fn modulus<R: Real>(z: Complex<R>) -> R {
    z.re.hypot(z.im)
}

fn argument<R: Real>(z: Complex<R>) -> f64 {
    libm::atan2(z.im.to_f64(), z.re.to_f64())
}

/// `|P(z)| / Σ|cᵢ||z|ⁱ`.
pub fn backward_error<R: Real>(poly: &Polynomial<R>, z: Complex<R>) -> f64 {
    let value = modulus(poly.eval_complex(z)).to_f64();
    let scale = poly.abs_eval(modulus(z)).to_f64();
    if scale == 0.0 {
        value
    } else {
        value / scale
    }
}

/// A root estimate before and after Newton polishing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polished<R> {
    pub root: Complex<R>,
    pub initial_error: f64,
    pub final_error: f64,
}

/// Newton iteration from `z0`, keeping the iterate with the smallest
/// backward error (so polishing never makes a root worse).
pub fn polish<R: Real>(poly: &Polynomial<R>, z0: Complex<R>) -> Polished<R> {
    let initial_error = backward_error(poly, z0);
    let mut best = (z0, initial_error);
    let mut z = z0;
    let mut stalled = 0;
    for _ in 0..MAX_NEWTON_STEPS {
        let d = poly.derivative_at(z);
        if d.is_zero() {
            break;
        }
        let step = poly.eval_complex(z) / d;
        z = z - step;
        let err = backward_error(poly, z);
        if err < best.1 {
            best = (z, err);
            stalled = 0;
        } else {
            stalled += 1;
        }
        let tiny = modulus(step) <= modulus(z) * R::from_f64(R::EPSILON);
        if err == 0.0 || tiny || stalled >= 3 {
            break;
        }
    }
    Polished {
        root: best.0,
        initial_error,
        final_error: best.1,
    }
}

/// All roots of `poly`, polished, with backward error below
/// [`BACKWARD_ERROR_LIMIT`].
pub fn polynomial_roots<R: Real>(poly: &Polynomial<R>) -> Result<Vec<Complex<R>>> {
    let n = poly.degree();
    if n == 0 {
        return Err(Error::NoRoots);
    }
    let lead = poly.leading().to_f64();
    let monic: Vec<f64> = poly.coeffs()[..n].iter().map(|c| c.to_f64() / lead).collect();
    let estimates = companion_eigenvalues(&monic)?;

    let mut roots = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    for z in estimates {
        let z = Complex::new(R::from_f64(z.re), R::from_f64(z.im));
        let polished = polish(poly, z);
        worst = worst.max(polished.final_error);
        roots.push(polished.root);
    }
    if !(worst <= BACKWARD_ERROR_LIMIT) {
        return Err(Error::NumericalFailure { residual: worst });
    }
    Ok(roots)
}

/// All `2m − 2` roots of the characteristic polynomial.
pub fn find_roots<R: Real>(cp: &CharPoly<R>) -> Result<Vec<Complex<R>>> {
    polynomial_roots(cp.poly())
}

/// `P′(λ)`.
pub fn derivative_at<R: Real>(cp: &CharPoly<R>, lambda: Complex<R>) -> Complex<R> {
    cp.poly().derivative_at(lambda)
}

/// Splits roots into interior and exterior halves with the default margin.
pub fn select_interior<R: Real>(roots: &[Complex<R>]) -> Result<Spectrum<R>> {
    select_interior_with_margin(roots, UNIT_CIRCLE_MARGIN)
}

pub fn select_interior_with_margin<R: Real>(roots: &[Complex<R>], margin: f64) -> Result<Spectrum<R>> {
    let mut interior = Vec::new();
    let mut outside = Vec::new();
    for &z in roots {
        let r = modulus(z).to_f64();
        if libm::fabs(r - 1.0) < margin {
            return Err(Error::NearUnitCircle { modulus: r });
        }
        if r < 1.0 {
            interior.push(z);
        } else {
            outside.push(z);
        }
    }
    if interior.len() != outside.len() {
        return Err(Error::UnbalancedSpectrum {
            interior: interior.len(),
            exterior: outside.len(),
        });
    }
    interior.sort_by(|a, b| {
        modulus(*b)
            .partial_cmp(&modulus(*a))
            .unwrap_or(Ordering::Equal)
            .then_with(|| argument(*a).partial_cmp(&argument(*b)).unwrap_or(Ordering::Equal))
    });

    let mut used = vec![false; outside.len()];
    let mut exterior = Vec::with_capacity(interior.len());
    for z in &interior {
        let target = Complex::new(R::one(), R::zero()) / *z;
        let (best, _) = outside
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, w)| (i, modulus(*w - target)))
            .fold((usize::MAX, None::<R>), |acc, (i, d)| match acc.1 {
                Some(bd) if bd <= d => acc,
                _ => (i, Some(d)),
            });
        used[best] = true;
        exterior.push(outside[best]);
    }
    Ok(Spectrum {
        interior,
        exterior,
        residual: 0.0,
    })
}

/// Roots, split and ordered, with the worst backward error recorded.
pub fn spectrum<R: Real>(cp: &CharPoly<R>) -> Result<Spectrum<R>> {
    let roots = find_roots(cp)?;
    let mut sp = select_interior(&roots)?;
    sp.residual = roots
        .iter()
        .map(|z| backward_error(cp.poly(), *z))
        .fold(0.0, f64::max);
    Ok(sp)
}

/// Eigenvalues of the companion matrix of the monic polynomial
/// `zⁿ + c[n−1]zⁿ⁻¹ + … + c[0]`.
pub fn companion_eigenvalues(c: &[f64]) -> Result<Vec<Complex<f64>>> {
    let n = c.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1-based, upper Hessenberg: first row −c[n−1..0], ones below the diagonal
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for k in 1..=n {
        a[1][k] = -c[n - k];
    }
    for k in 2..=n {
        a[k][k - 1] = 1.0;
    }
    balance(&mut a, n);
    hqr(&mut a, n)
}

/// Similarity scaling by powers of two so that row and column norms are
/// comparable.
fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += libm::fabs(a[j][i]);
                    r += libm::fabs(a[i][j]);
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= SQRDX;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= SQRDX;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for j in 1..=n {
                        a[j][i] *= f;
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        libm::fabs(a)
    } else {
        -libm::fabs(a)
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (1-based storage).
/// Complex eigenvalues come out as exact conjugate pairs.
#[allow(clippy::many_single_char_names)]
fn hqr(a: &mut [Vec<f64>], n: usize) -> Result<Vec<Complex<f64>>> {
    let mut wr = vec![0.0f64; n + 1];
    let mut wi = vec![0.0f64; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += libm::fabs(a[i][j]);
        }
    }
    let mut nn = n as isize;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // look for a single small subdiagonal element
            let mut l = nu;
            while l >= 2 {
                let mut s = libm::fabs(a[l - 1][l - 1]) + libm::fabs(a[l][l]);
                if s == 0.0 {
                    s = anorm;
                }
                if libm::fabs(a[l][l - 1]) + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
            } else {
                y = a[nu - 1][nu - 1];
                w = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nu - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = libm::sqrt(libm::fabs(q));
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != 0.0 {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITERATIONS {
                        return Err(Error::NumericalFailure { residual: f64::INFINITY });
                    }
                    if its == 10 || its == 20 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nu {
                            a[i][i] -= x;
                        }
                        let s = libm::fabs(a[nu][nu - 1]) + libm::fabs(a[nu - 1][nu - 2]);
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    // look for two consecutive small subdiagonal elements
                    let mut m = nu - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        let s = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = libm::fabs(a[m][m - 1]) * (libm::fabs(q) + libm::fabs(r));
                        let v = libm::fabs(p)
                            * (libm::fabs(a[m - 1][m - 1]) + libm::fabs(z) + libm::fabs(a[m + 1][m + 1]));
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nu {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    // double QR step on rows l..nn, columns m..nn
                    for k in m..nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nu - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign(libm::sqrt(p * p + q * q + r * r), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nu - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nu - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                    }
                }
            }
            if nn < 1 || l + 1 >= nn as usize {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}
