//! Error types shared across the crate.

use core::fmt;

/// A rejected parameter value, reported with the offending input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamError {
    /// Probability level `p` outside its admissible interval.
    ProbabilityLevel { value: f64, allow_zero: bool },
    /// Risk-aversion parameter `r` at or below 1. The family degenerates in
    /// the risk-neutral limit `r -> 1`, so such values are rejected outright.
    RiskAversion { value: f64 },
    /// Negative loading `lambda` on the tail variability term.
    NegativeLoading { value: f64 },
    /// An argument that must lie in the unit interval `[0, 1]`.
    UnitInterval { value: f64 },
    /// Student-t shape parameter too small for the requested quantity.
    StudentTParameter { value: f64, minimum: f64 },
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamError::ProbabilityLevel { value, allow_zero } => {
                if allow_zero {
                    write!(f, "probability level must lie in [0, 1), got {value}")
                } else {
                    write!(f, "probability level must lie in (0, 1), got {value}")
                }
            }
            ParamError::RiskAversion { value } => write!(
                f,
                "risk-aversion parameter must exceed 1 (the family vanishes in the \
                 risk-neutral limit), got {value}"
            ),
            ParamError::NegativeLoading { value } => {
                write!(f, "loading must be non-negative, got {value}")
            }
            ParamError::UnitInterval { value } => {
                write!(f, "argument must lie in [0, 1], got {value}")
            }
            ParamError::StudentTParameter { value, minimum } => write!(
                f,
                "Student-t shape parameter must exceed {minimum} here, got {value}"
            ),
        }
    }
}

impl core::error::Error for ParamError {}

/// Failure of the adaptive quadrature engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadError {
    /// The subdivision budget ran out before the error bound met the target.
    /// The best available estimate and its bound are carried along.
    NotConverged { estimate: f64, error_bound: f64 },
    /// The integrand produced a NaN or infinite value.
    NonFinite { at: f64 },
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            QuadError::NotConverged {
                estimate,
                error_bound,
            } => write!(
                f,
                "quadrature did not converge within the subdivision budget \
                 (estimate {estimate:e}, error bound {error_bound:e})"
            ),
            QuadError::NonFinite { at } => {
                write!(f, "integrand returned a non-finite value at u = {at}")
            }
        }
    }
}

impl core::error::Error for QuadError {}

/// A sample rejected at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleError {
    /// No observations.
    Empty,
    /// A NaN or infinite observation at the given input index.
    NonFinite { index: usize },
}

impl fmt::Display for SampleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SampleError::Empty => write!(f, "sample contains no observations"),
            SampleError::NonFinite { index } => {
                write!(f, "sample contains a non-finite value at index {index}")
            }
        }
    }
}

impl core::error::Error for SampleError {}

/// Any failure while evaluating a measure: bad parameters or quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureError {
    Param(ParamError),
    Quadrature(QuadError),
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::Param(e) => e.fmt(f),
            MeasureError::Quadrature(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for MeasureError {}

impl From<ParamError> for MeasureError {
    fn from(e: ParamError) -> Self {
        MeasureError::Param(e)
    }
}

impl From<QuadError> for MeasureError {
    fn from(e: QuadError) -> Self {
        MeasureError::Quadrature(e)
    }
}

/// Errors specific to derivative evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SensError {
    /// The spectral weight is not differentiable at the kink `u = p`.
    AtKink { u: f64 },
    Param(ParamError),
}

impl fmt::Display for SensError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SensError::AtKink { u } => {
                write!(f, "spectral weight has a kink at u = {u}; derivative undefined")
            }
            SensError::Param(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for SensError {}

impl From<ParamError> for SensError {
    fn from(e: ParamError) -> Self {
        SensError::Param(e)
    }
}
