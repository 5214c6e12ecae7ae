// Full-precision published coefficient tables, and `!(x > c)` guards
// that must reject NaN (a plain `x <= c` would let it through).
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]
//! Signed Choquet risk and variability measures built around the extended
//! Gini family.
//!
//! The crate is organised in layers:
//!
//! * [`special`] — scalar special functions (normal CDF/quantile, incomplete
//!   beta, Student-t CDF/quantile) that everything else builds on.
//! * [`quadrature`] — an adaptive Gauss–Kronrod integrator with forced
//!   breakpoints and substitutions for integrable endpoint singularities.
//! * [`choquet`] — quantile models, weight functions, distortion functions,
//!   and the signed Choquet integral that interprets them.
//! * [`family`] — the extended Gini family: kernel and distortion generators,
//!   the spectral weight `phi`, the coherence bound on the loading, and the
//!   measures VaR, ES, Gini, extended Gini, tail extended Gini, and extended
//!   Gini shortfall.
//! * [`analytic`] — closed forms for spherical location-scale models
//!   (symmetric uniform, normal, Student-t).
//! * [`estimator`] — order-statistic estimators on finite samples.
//! * [`sensitivity`] — analytic partial derivatives of the spectral weight
//!   with finite-difference verification.
//! * [`verifier`] — randomized axiom checks and a subadditivity
//!   counterexample search for loadings beyond the coherence bound.
//!
//! The crate is `no_std`-compatible (with `alloc`) when built without the
//! default `std` feature; math primitives then come from `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod fp;

pub mod analytic;
pub mod choquet;
pub mod error;
pub mod estimator;
pub mod family;
pub mod models;
pub mod quadrature;
pub mod sensitivity;
pub mod special;
pub mod verifier;

pub use choquet::{
    choquet_from_distortion, choquet_integral, DistortionFunction, QuantileModel,
    TailFlags, WeightFunction,
};
pub use error::{MeasureError, ParamError, QuadError, SampleError, SensError};
pub use family::{MeasureId, MeasureValue, Method, ParamSet};
pub use quadrature::{QuadOptions, QuadResult};
