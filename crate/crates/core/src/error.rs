use core::fmt;

/// Everything that can go wrong while building or checking an operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Requested power/degree is above the exact-integer capacity.
    Capacity { requested: usize, max: usize },
    /// A geometric-type series does not converge (ratio >= 1).
    Divergent { ratio: f64 },
    /// `q = 1` makes the closed form of a finite power sum singular.
    Pole,
    /// Operator order outside the guard.
    OrderOutOfRange { m: usize, max: usize },
    /// Grid step outside the guard.
    StepOutOfRange { h: f64, min: f64, max: f64 },
    /// The characteristic polynomial is constant (m = 1) and has no roots.
    NoRoots,
    /// Root finding or series evaluation failed to reach its accuracy target.
    NumericalFailure { residual: f64 },
    /// A root lies on or too close to the unit circle.
    NearUnitCircle { modulus: f64 },
    /// Roots do not split evenly into interior and exterior halves.
    UnbalancedSpectrum { interior: usize, exterior: usize },
    /// P' nearly vanishes at an interior root.
    NearMultipleRoot { derivative: f64 },
    /// An assembled operator value has a non-negligible imaginary part.
    NotReal { imag: f64, magnitude: f64 },
    /// Monomial degree beyond the annihilated range 2m-3.
    Domain { n: usize, max: Option<usize> },
    /// Closed-form and truncated convolution routes disagree.
    RouteMismatch { closed: f64, truncated: f64, scale: f64 },
    /// The truncated route needed more terms than allowed.
    TruncationLimit { terms: usize },
    /// Structurally malformed operator parts.
    Malformed(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Capacity { requested, max } => {
                write!(f, "capacity exceeded: requested {requested}, maximum is {max}")
            }
            Error::Divergent { ratio } => write!(f, "series diverges: ratio {ratio} is not below 1"),
            Error::Pole => write!(f, "closed form has a pole at q = 1"),
            Error::OrderOutOfRange { m, max } => {
                write!(f, "m exceeds guard: m = {m}, allowed 1..={max}")
            }
            Error::StepOutOfRange { h, min, max } => {
                write!(f, "h outside guard: h = {h}, allowed [{min}, {max}]")
            }
            Error::NoRoots => write!(f, "no roots at m=1: characteristic polynomial is constant"),
            Error::NumericalFailure { residual } => {
                write!(f, "numerical failure: worst residual {residual:e}")
            }
            Error::NearUnitCircle { modulus } => {
                write!(f, "root too close to the unit circle: |lambda| = {modulus}")
            }
            Error::UnbalancedSpectrum { interior, exterior } => write!(
                f,
                "unbalanced spectrum: {interior} interior vs {exterior} exterior roots"
            ),
            Error::NearMultipleRoot { derivative } => {
                write!(f, "near-multiple root: |P'(lambda)| = {derivative:e}")
            }
            Error::NotReal { imag, magnitude } => write!(
                f,
                "operator value not real: imaginary part {imag:e} vs magnitude {magnitude:e}"
            ),
            Error::Domain { n, max } => match max {
                Some(max) => write!(f, "monomial degree {n} exceeds annihilated range {max}"),
                None => write!(f, "monomial degree {n}: no monomials are annihilated at m=1"),
            },
            Error::RouteMismatch {
                closed,
                truncated,
                scale,
            } => write!(
                f,
                "closed form {closed:e} and truncated sum {truncated:e} disagree (scale {scale:e})"
            ),
            Error::TruncationLimit { terms } => {
                write!(f, "truncated sum did not converge within {terms} terms")
            }
            Error::Malformed(what) => write!(f, "malformed operator: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
