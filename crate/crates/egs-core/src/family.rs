//! The Gini measure family: value-at-risk, expected shortfall, the mean
//! difference and its extended form, the tail extension, and the loaded
//! shortfall built from them.
//!
//! All measures are signed Choquet integrals of the quantile against a
//! specific weight. The loaded shortfall uses the spectral weight
//!
//! ```text
//! phi(u) = [ (1-p) + 2*lambda*( g_r(u) + (1-p)^(r-1) ) ] / (1-p)^2
//! ```
//!
//! on `[p, 1]` (zero below `p`), where `g_r(u) = -r (1-u)^(r-1)`. The weight
//! always integrates to one; it stays non-negative — and the measure stays
//! coherent — exactly while the loading does not exceed
//! `1 / (2 (r-1) (1-p)^(r-2))`.
//!
//! Everything here works in loss space: positive values are losses. Return
//! data must be negated before it reaches these functions.

use crate::choquet::{choquet_integral, QuantileModel, WeightFunction};
use crate::error::{MeasureError, ParamError};
use crate::fp;
use alloc::vec::Vec;

/// A validated `(p, r, lambda)` triple for the loaded shortfall.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamSet {
    p: f64,
    r: f64,
    lambda: f64,
}

impl ParamSet {
    /// Validates `0 < p < 1`, `r > 1`, `lambda >= 0`.
    ///
    /// Loadings beyond the coherence bound are accepted — the measure is
    /// still well defined, merely not subadditive — and flagged through
    /// [`ParamSet::is_coherent`].
    pub fn new(p: f64, r: f64, lambda: f64) -> Result<Self, ParamError> {
        check_p(p)?;
        check_r(r)?;
        if !(lambda >= 0.0) {
            return Err(ParamError::NegativeLoading { value: lambda });
        }
        Ok(ParamSet { p, r, lambda })
    }

    /// The loading expressed as a fraction of the coherence bound:
    /// `lambda = fraction * lambda_max(r, p)`.
    pub fn with_lambda_fraction(p: f64, r: f64, fraction: f64) -> Result<Self, ParamError> {
        check_p(p)?;
        check_r(r)?;
        if !(fraction >= 0.0) {
            return Err(ParamError::NegativeLoading { value: fraction });
        }
        let bound = lambda_max_unchecked(r, p);
        ParamSet::new(p, r, fraction * bound)
    }

    /// The midpoint of the coherent loading range, `lambda_max / 2`.
    pub fn midpoint(p: f64, r: f64) -> Result<Self, ParamError> {
        ParamSet::with_lambda_fraction(p, r, 0.5)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The largest loading keeping the spectral weight non-negative.
    pub fn lambda_max(&self) -> f64 {
        lambda_max_unchecked(self.r, self.p)
    }

    /// Whether the loading sits inside the coherence region.
    pub fn is_coherent(&self) -> bool {
        self.lambda <= self.lambda_max()
    }

    /// The spectral weight at `u`: zero below `p`, and on `[p, 1]` the
    /// normalized tail density with the mean-difference tilt.
    pub fn phi(&self, u: f64) -> f64 {
        if u < self.p {
            0.0
        } else {
            self.phi_bracket(u)
        }
    }

    /// The weight formula without the indicator, valid on `[p, 1]`.
    fn phi_bracket(&self, u: f64) -> f64 {
        let one_minus_p = 1.0 - self.p;
        let tilt = g_r_unchecked(u, self.r) + fp::powf(one_minus_p, self.r - 1.0);
        (one_minus_p + 2.0 * self.lambda * tilt) / (one_minus_p * one_minus_p)
    }

    /// The spectral weight packaged for the Choquet engine. Its mass is one
    /// in closed form, so no measuring quadrature runs.
    pub fn weight(&self) -> WeightFunction {
        let params = *self;
        WeightFunction::with_total_mass(
            move |u| params.phi_bracket(u),
            (self.p, 1.0),
            Vec::new(),
            1.0,
        )
    }
}

pub(crate) fn check_p(p: f64) -> Result<(), ParamError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(ParamError::ProbabilityLevel {
            value: p,
            allow_zero: false,
        })
    }
}

fn check_p_or_zero(p: f64) -> Result<(), ParamError> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(ParamError::ProbabilityLevel {
            value: p,
            allow_zero: true,
        })
    }
}

pub(crate) fn check_r(r: f64) -> Result<(), ParamError> {
    if r > 1.0 {
        Ok(())
    } else {
        Err(ParamError::RiskAversion { value: r })
    }
}

fn check_unit(u: f64) -> Result<(), ParamError> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(ParamError::UnitInterval { value: u })
    }
}

fn g_r_unchecked(u: f64, r: f64) -> f64 {
    -r * fp::powf(1.0 - u, r - 1.0)
}

fn lambda_max_unchecked(r: f64, p: f64) -> f64 {
    1.0 / (2.0 * (r - 1.0) * fp::powf(1.0 - p, r - 2.0))
}

/// The risk-aversion kernel `g_r(u) = -r (1-u)^(r-1)`, non-decreasing in
/// `u` with `g_r(1) = 0`.
pub fn g_r(u: f64, r: f64) -> Result<f64, ParamError> {
    check_unit(u)?;
    check_r(r)?;
    Ok(g_r_unchecked(u, r))
}

/// The convex kernel `h_r(u) = u + (1-u)^r - 1` vanishing at both ends of
/// the unit interval; its derivative is `1 + g_r(u)`.
pub fn h_r(u: f64, r: f64) -> Result<f64, ParamError> {
    check_unit(u)?;
    check_r(r)?;
    Ok(u + fp::powf(1.0 - u, r) - 1.0)
}

/// The supremum of loadings for which the spectral weight stays
/// non-negative: `1 / (2 (r-1) (1-p)^(r-2))`.
pub fn lambda_max(r: f64, p: f64) -> Result<f64, ParamError> {
    check_r(r)?;
    check_p(p)?;
    Ok(lambda_max_unchecked(r, p))
}

/// Which member of the family a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MeasureId {
    Var,
    Es,
    Gini,
    EGini,
    Teg,
    Egs,
}

/// How a value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Analytic,
    Quadrature,
    Empirical,
}

/// A measure value tagged with its identity, parameters, and provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureValue {
    pub value: f64,
    pub measure_id: MeasureId,
    pub params: ParamSet,
    pub method: Method,
}

/// Value-at-risk: the quantile at `p` under the left-continuous inverse
/// convention.
pub fn var<Q>(q: &Q, p: f64) -> Result<f64, ParamError>
where
    Q: QuantileModel + ?Sized,
{
    check_p(p)?;
    Ok(q.quantile(p))
}

/// Expected shortfall: the average quantile beyond `p`.
pub fn es<Q>(q: &Q, p: f64, tol: f64) -> Result<f64, MeasureError>
where
    Q: QuantileModel + ?Sized,
{
    check_p(p)?;
    let w = WeightFunction::with_total_mass(move |_| 1.0 / (1.0 - p), (p, 1.0), Vec::new(), 1.0);
    Ok(choquet_integral(q, &w, tol)?)
}

/// The Gini mean difference `E|X* - X**|` of two independent copies,
/// evaluated in quantile form with the weight `2 (2u - 1)`.
pub fn gini<Q>(q: &Q, tol: f64) -> Result<f64, MeasureError>
where
    Q: QuantileModel + ?Sized,
{
    let w = WeightFunction::with_total_mass(|u| 2.0 * (2.0 * u - 1.0), (0.0, 1.0), Vec::new(), 0.0);
    Ok(choquet_integral(q, &w, tol)?)
}

/// The extended mean difference with risk-aversion parameter `r`; `r = 2`
/// recovers [`gini`], and the value fades to zero as `r` drops to one.
pub fn egini<Q>(q: &Q, r: f64, tol: f64) -> Result<f64, MeasureError>
where
    Q: QuantileModel + ?Sized,
{
    check_r(r)?;
    let w = WeightFunction::with_total_mass(
        move |u| 2.0 * (1.0 + g_r_unchecked(u, r)),
        (0.0, 1.0),
        Vec::new(),
        0.0,
    );
    Ok(choquet_integral(q, &w, tol)?)
}

/// The tail extension of the mean difference beyond level `p`.
///
/// `p = 0` is admitted: the tail then covers the whole distribution and the
/// value reduces to the extended mean difference (exactly the Gini at
/// `r = 2`).
pub fn teg<Q>(q: &Q, r: f64, p: f64, tol: f64) -> Result<f64, MeasureError>
where
    Q: QuantileModel + ?Sized,
{
    check_r(r)?;
    check_p_or_zero(p)?;
    let one_minus_p = 1.0 - p;
    let scale = 2.0 / (one_minus_p * one_minus_p);
    let shift = fp::powf(one_minus_p, r - 1.0);
    let w = WeightFunction::with_total_mass(
        move |u| scale * (g_r_unchecked(u, r) + shift),
        (p, 1.0),
        Vec::new(),
        0.0,
    );
    Ok(choquet_integral(q, &w, tol)?)
}

/// The loaded shortfall: expected shortfall plus `lambda` times the tail
/// extension, evaluated as a single Choquet integral against the spectral
/// weight.
///
/// This is the cheap, numerically tight path; [`egs_decomposed`] computes
/// the two terms separately for cross-checking and reporting.
pub fn egs<Q>(q: &Q, params: &ParamSet, tol: f64) -> Result<f64, MeasureError>
where
    Q: QuantileModel + ?Sized,
{
    let w = params.weight();
    Ok(choquet_integral(q, &w, tol)?)
}

/// The loaded shortfall split into its parts.
#[derive(Clone, Copy, Debug)]
pub struct EgsParts {
    /// The expected shortfall at `p`.
    pub es: f64,
    /// The tail extension at `(r, p)`.
    pub teg: f64,
    /// `es + lambda * teg`.
    pub egs: f64,
    /// Whether the loading sits inside the coherence region.
    pub coherent: bool,
}

/// Computes the shortfall by its definition `ES + lambda * TEG`, returning
/// the parts alongside the total.
pub fn egs_decomposed<Q>(q: &Q, params: &ParamSet, tol: f64) -> Result<EgsParts, MeasureError>
where
    Q: QuantileModel + ?Sized,
{
    let es = es(q, params.p(), tol)?;
    let teg = teg(q, params.r(), params.p(), tol)?;
    Ok(EgsParts {
        es,
        teg,
        egs: es + params.lambda() * teg,
        coherent: params.is_coherent(),
    })
}
