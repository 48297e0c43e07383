//! Discrete analogue of the differential operator `d²ᵐ/dx²ᵐ − d²ᵐ⁻²/dx²ᵐ⁻²`
//! on the uniform grid `hβ`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything numeric is generic
//! over [`Real`], implemented for `f64` and the double-double type [`Dd`].

#![no_std]

extern crate alloc;

pub mod char_poly;
pub mod dd;
pub mod error;
pub mod operator;
pub mod poly;
pub mod real;
pub mod special;
pub mod spectrum;
pub mod verify;

pub use char_poly::{build_characteristic_polynomial, leading_coefficient, CharPoly, Guard, OperatorSpec};
pub use dd::Dd;
pub use error::{Error, Result};
pub use operator::{construct, fundamental_solution, DiscreteOperator, FundamentalSolution, Term};
pub use poly::Polynomial;
pub use real::{Real, Scalar};
pub use spectrum::{find_roots, select_interior, spectrum, Spectrum};
pub use num_complex;
pub use verify::{
    convolve_exponential, convolve_fundamental, convolve_monomial, default_tolerance, root_weighted_fundamental_sum,
    run_verification, Convolution, VerificationReport,
};
