//! Order-statistic estimators on finite samples.
//!
//! The empirical quantile function of a sample of size `n` is the
//! left-continuous step function `u -> X_(ceil(n u))` built from the order
//! statistics `X_(1) <= ... <= X_(n)`. Feeding it to the measures in
//! [`crate::family`] suggests two kinds of plug-in estimator, and this
//! module implements both:
//!
//! * the spectral estimator for the shortfall family, which weights the
//!   order statistics by the spectral weight sampled on the grid `i / n`
//!   and normalised to sum to one; and
//! * exact-cell estimators for the variability measures, which integrate
//!   the weight function in closed form over each cell on which the
//!   empirical quantile function is constant, so no quadrature error enters
//!   at all.

use crate::choquet::{QuantileModel, TailFlags};
use crate::error::{ParamError, SampleError};
use crate::family::{check_p, check_r, ParamSet};
use crate::fp;
use alloc::vec::Vec;

/// A finite sample of losses, stored sorted.
///
/// The crate-wide sign convention is that positive values are losses. Data
/// that arrives as returns (positive = gain) should come in through
/// [`EmpiricalSample::from_negated_returns`], which flips the sign and
/// records that it did so.
#[derive(Clone, Debug)]
pub struct EmpiricalSample {
    sorted: Vec<f64>,
    negated: bool,
}

impl EmpiricalSample {
    /// Builds a sample from losses (positive = loss).
    ///
    /// Rejects empty input and non-finite entries; the error reports the
    /// index of the first offending entry in the original order.
    pub fn from_losses(data: &[f64]) -> Result<Self, SampleError> {
        Self::build(data, false)
    }

    /// Builds a sample from returns (positive = gain) by negating them.
    pub fn from_negated_returns(returns: &[f64]) -> Result<Self, SampleError> {
        Self::build(returns, true)
    }

    fn build(data: &[f64], negate: bool) -> Result<Self, SampleError> {
        if data.is_empty() {
            return Err(SampleError::Empty);
        }
        for (index, value) in data.iter().enumerate() {
            if !value.is_finite() {
                return Err(SampleError::NonFinite { index });
            }
        }
        let mut sorted: Vec<f64> = if negate {
            data.iter().map(|value| -value).collect()
        } else {
            data.to_vec()
        };
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite by construction"));
        Ok(EmpiricalSample {
            sorted,
            negated: negate,
        })
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    /// Always false: construction rejects empty input.
    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// The order statistics, ascending.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Whether the data were negated on the way in.
    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// The `i`-th order statistic, 1-based: `order_statistic(1)` is the
    /// minimum and `order_statistic(n)` the maximum.
    pub fn order_statistic(&self, i: usize) -> f64 {
        self.sorted[i - 1]
    }
}

impl QuantileModel for EmpiricalSample {
    /// The left-continuous empirical quantile `X_(ceil(n u))`.
    fn quantile(&self, u: f64) -> f64 {
        let n = self.sorted.len();
        let index = ceil_index(n as f64 * u).clamp(1, n);
        self.sorted[index - 1]
    }

    fn tail_flags(&self) -> TailFlags {
        TailFlags::BOUNDED
    }
}

/// Ceiling that forgives float dust: values within `1e-9` of an integer
/// round to it instead of spilling into the next cell, so `ceil(0.7 * 10)`
/// is 7 even though `0.7 * 10.0` is a hair above 7.
fn ceil_index(x: f64) -> usize {
    let nearest = fp::round(x);
    let snapped = if fp::abs(x - nearest) <= 1e-9 {
        nearest
    } else {
        fp::ceil(x)
    };
    if snapped < 1.0 {
        1
    } else {
        snapped as usize
    }
}

/// The empirical value-at-risk `X_(ceil(n p))`.
pub fn var_hat(sample: &EmpiricalSample, p: f64) -> Result<f64, ParamError> {
    check_p(p)?;
    let n = sample.len();
    let index = ceil_index(n as f64 * p).clamp(1, n);
    Ok(sample.order_statistic(index))
}

/// Spectral weights for the shortfall estimator on a sample of size `n`:
/// the spectral weight sampled at `i / n` for `i = 1..=n`, normalised to
/// sum to one.
///
/// The weight function integrates to one for every loading, and it is
/// non-decreasing, so the right-endpoint grid sum is at least `n` times
/// that; the normaliser is therefore strictly positive even beyond the
/// coherence bound, where individual weights go negative.
pub fn estimator_weights(n: usize, params: &ParamSet) -> Vec<f64> {
    let mut weights = Vec::with_capacity(n);
    let scale = 1.0 / n as f64;
    let mut total = 0.0;
    for i in 1..=n {
        let w = params.phi(i as f64 * scale);
        total += w;
        weights.push(w);
    }
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// The spectral estimator of the extended Gini shortfall: the weighted sum
/// of the order statistics under [`estimator_weights`].
///
/// Not affine in the loading: the normaliser depends on it too.
pub fn egs_hat(sample: &EmpiricalSample, params: &ParamSet) -> f64 {
    let weights = estimator_weights(sample.len(), params);
    let mut total = 0.0;
    for (x, w) in sample.sorted().iter().zip(&weights) {
        total += x * w;
    }
    total
}

/// The spectral estimator of the expected shortfall: the shortfall
/// estimator with the loading set to zero.
pub fn es_hat(sample: &EmpiricalSample, p: f64) -> Result<f64, ParamError> {
    let params = ParamSet::new(p, 2.0, 0.0)?;
    Ok(egs_hat(sample, &params))
}

/// `t^r` with the base clamped at zero: `1 - i/n` can land a few ulps below
/// zero at the top of the grid, and a negative base with fractional
/// exponent would poison the sum with NaN.
fn survival_pow(t: f64, r: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        fp::powf(t, r)
    }
}

/// Exact-cell estimator of the extended Gini coefficient.
///
/// The weight `2 (1 + g_r(u))` integrates in closed form over the cell
/// `((i-1)/n, i/n]`, giving cell weight
/// `2 [1/n + (1 - i/n)^r - (1 - (i-1)/n)^r]`.
pub fn egini_hat(sample: &EmpiricalSample, r: f64) -> Result<f64, ParamError> {
    check_r(r)?;
    let n = sample.len();
    let scale = 1.0 / n as f64;
    let mut total = 0.0;
    let mut survival_prev = 1.0; // (1 - (i-1)/n)^r at i = 1
    for i in 1..=n {
        let survival = survival_pow(1.0 - i as f64 * scale, r);
        let weight = 2.0 * (scale + survival - survival_prev);
        total += sample.order_statistic(i) * weight;
        survival_prev = survival;
    }
    Ok(total)
}

/// Exact-cell estimator of the Gini mean difference: [`egini_hat`] at
/// `r = 2`, which coincides with the pairwise mean absolute difference
/// `(1/n^2) * sum_ij |x_i - x_j|`.
pub fn gini_hat(sample: &EmpiricalSample) -> f64 {
    egini_hat(sample, 2.0).expect("r = 2 is always a valid order")
}

/// Exact-cell estimator of the tail extended Gini coefficient.
///
/// Each cell `((i-1)/n, i/n]` is clipped to `[p, 1]` and the weight
/// `(2/(1-p)^2) [g_r(u) + (1-p)^(r-1)]` integrated in closed form over the
/// clipped cell `[a, b]`, giving
/// `(2/(1-p)^2) [((1-b)^r - (1-a)^r) + (1-p)^(r-1) (b - a)]`.
///
/// Accepts `p = 0`, where it reduces to [`egini_hat`].
pub fn teg_hat(sample: &EmpiricalSample, r: f64, p: f64) -> Result<f64, ParamError> {
    check_r(r)?;
    if !(0.0..1.0).contains(&p) {
        return Err(ParamError::ProbabilityLevel {
            value: p,
            allow_zero: true,
        });
    }
    let n = sample.len();
    let scale = 1.0 / n as f64;
    let one_minus_p = 1.0 - p;
    let front = 2.0 / (one_minus_p * one_minus_p);
    let shift = fp::powf(one_minus_p, r - 1.0);
    let mut total = 0.0;
    for i in 1..=n {
        let a = ((i - 1) as f64 * scale).max(p);
        let b = i as f64 * scale;
        if b <= a {
            continue;
        }
        let weight =
            front * ((survival_pow(1.0 - b, r) - survival_pow(1.0 - a, r)) + shift * (b - a));
        total += sample.order_statistic(i) * weight;
    }
    Ok(total)
}
