//! Partial derivatives of the spectral weight and of the coherence bound.
//!
//! Every first and mixed partial of
//!
//! ```text
//! phi(u) = [ (1-p) + 2 lambda ( (1-p)^(r-1) - r (1-u)^(r-1) ) ] / (1-p)^2
//! ```
//!
//! on the window `u in (p, 1]` has a closed form, and each one here is
//! paired with the threshold in `u` (or in `r`) where its sign flips, so a
//! caller can answer "which direction does the weight move when I nudge
//! this knob" without sampling. An adaptive central-difference helper
//! backs every closed form with an independent numeric check.
//!
//! Below the window the weight is identically zero, so all partials vanish;
//! at `u = p` the window edge jumps and no derivative exists — that case is
//! reported as [`SensError::AtKink`] rather than silently picking a side.

use crate::error::{ParamError, SensError};
use crate::family::{check_p, check_r, ParamSet};
use crate::fp;

fn check_u(u: f64) -> Result<(), ParamError> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(ParamError::UnitInterval { value: u })
    }
}

/// Classifies `u` against the window: error at the kink, `None` below it
/// (all partials are zero there), `Some(1 - u)` inside.
fn window_position(params: &ParamSet, u: f64) -> Result<Option<f64>, SensError> {
    check_u(u)?;
    if u == params.p() {
        return Err(SensError::AtKink { u });
    }
    if u < params.p() {
        return Ok(None);
    }
    Ok(Some(1.0 - u))
}

/// `d phi / d u = 2 lambda r (r-1) (1-u)^(r-2) / (1-p)^2`.
///
/// Non-negative: the weight never decreases across quantile levels. For
/// `r < 2` the slope diverges as `u -> 1`; the IEEE value `+inf` is the
/// honest limit and is returned as such.
pub fn dphi_du(params: &ParamSet, u: f64) -> Result<f64, SensError> {
    let survival = match window_position(params, u)? {
        None => return Ok(0.0),
        Some(s) => s,
    };
    let (r, lambda) = (params.r(), params.lambda());
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let q = 1.0 - params.p();
    Ok(2.0 * lambda * r * (r - 1.0) * fp::powf(survival, r - 2.0) / (q * q))
}

/// `d phi / d lambda = 2 [ (1-p)^(r-1) - r (1-u)^(r-1) ] / (1-p)^2`.
///
/// Negative at the bottom of the window, positive at the top: raising the
/// loading shifts weight from the near tail to the deep tail while the
/// total mass stays one. The sign flips at [`lambda_root`].
pub fn dphi_dlambda(params: &ParamSet, u: f64) -> Result<f64, SensError> {
    let survival = match window_position(params, u)? {
        None => return Ok(0.0),
        Some(s) => s,
    };
    let r = params.r();
    let q = 1.0 - params.p();
    Ok(2.0 * (fp::powf(q, r - 1.0) - r * fp::powf(survival, r - 1.0)) / (q * q))
}

/// The level `u_0 = 1 - (1-p) r^(-1/(r-1))` where [`dphi_dlambda`]
/// vanishes. Always lies inside `(p, 1)`.
pub fn lambda_root(params: &ParamSet) -> f64 {
    let r = params.r();
    1.0 - (1.0 - params.p()) * fp::powf(r, -1.0 / (r - 1.0))
}

/// `d phi / d p = [ 1 - 2 lambda (r-3) (1-p)^(r-2)
///                    - 4 lambda r (1-u)^(r-1) / (1-p) ] / (1-p)^2`.
pub fn dphi_dp(params: &ParamSet, u: f64) -> Result<f64, SensError> {
    let survival = match window_position(params, u)? {
        None => return Ok(0.0),
        Some(s) => s,
    };
    let (r, lambda) = (params.r(), params.lambda());
    let q = 1.0 - params.p();
    let numerator = 1.0 - 2.0 * lambda * (r - 3.0) * fp::powf(q, r - 2.0)
        - 4.0 * lambda * r * fp::powf(survival, r - 1.0) / q;
    Ok(numerator / (q * q))
}

/// The level `u*` above which [`dphi_dp`] turns non-negative:
///
/// ```text
/// u* = 1 - { [ (1-p) - 2 lambda (r-3) (1-p)^(r-1) ] / (4 lambda r) }^(1/(r-1))
/// ```
///
/// Returns `None` when the radicand is non-positive, in which case the
/// derivative is negative across the whole window, or when the loading is
/// zero, in which case the derivative is the constant `1/(1-p)^2`. A
/// returned threshold at or below `p` likewise means the derivative keeps
/// one sign (non-negative) on the window.
pub fn p_threshold(params: &ParamSet) -> Option<f64> {
    let (p, r, lambda) = (params.p(), params.r(), params.lambda());
    if lambda == 0.0 {
        return None;
    }
    let q = 1.0 - p;
    let radicand = (q - 2.0 * lambda * (r - 3.0) * fp::powf(q, r - 1.0)) / (4.0 * lambda * r);
    if radicand <= 0.0 {
        return None;
    }
    Some(1.0 - fp::powf(radicand, 1.0 / (r - 1.0)))
}

/// `d phi / d r = 2 lambda [ ln(1-p) (1-p)^(r-1)
///                           - (1-u)^(r-1) (1 + r ln(1-u)) ] / (1-p)^2`.
///
/// At `u = 1` the survival factor kills the second bracket (the limit of
/// `t^(r-1) ln t` is zero), leaving the strictly negative first term.
pub fn dphi_dr(params: &ParamSet, u: f64) -> Result<f64, SensError> {
    let survival = match window_position(params, u)? {
        None => return Ok(0.0),
        Some(s) => s,
    };
    let (r, lambda) = (params.r(), params.lambda());
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let q = 1.0 - params.p();
    let first = fp::ln(q) * fp::powf(q, r - 1.0);
    let second = if survival <= 0.0 {
        0.0
    } else {
        fp::powf(survival, r - 1.0) * (1.0 + r * fp::ln(survival))
    };
    Ok(2.0 * lambda * (first - second) / (q * q))
}

/// Whether [`dphi_dr`] is non-negative at `u`, from the closed-form sign
/// condition `ln(1-p) (1-p)^(r-1) >= (1-u)^(r-1) (1 + r ln(1-u))`.
pub fn dphi_dr_is_nonnegative(params: &ParamSet, u: f64) -> Result<bool, SensError> {
    let survival = match window_position(params, u)? {
        None => return Ok(true),
        Some(s) => s,
    };
    let r = params.r();
    let q = 1.0 - params.p();
    let lhs = fp::ln(q) * fp::powf(q, r - 1.0);
    let rhs = if survival <= 0.0 {
        0.0
    } else {
        fp::powf(survival, r - 1.0) * (1.0 + r * fp::ln(survival))
    };
    Ok(lhs >= rhs)
}

/// `d^2 phi / (du dp) = 4 lambda r (r-1) (1-u)^(r-2) / (1-p)^3`.
///
/// Non-negative everywhere on the window: pushing the level up steepens
/// the weight throughout.
pub fn d2phi_du_dp(params: &ParamSet, u: f64) -> Result<f64, SensError> {
    let survival = match window_position(params, u)? {
        None => return Ok(0.0),
        Some(s) => s,
    };
    let (r, lambda) = (params.r(), params.lambda());
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let q = 1.0 - params.p();
    Ok(4.0 * lambda * r * (r - 1.0) * fp::powf(survival, r - 2.0) / (q * q * q))
}

/// `d^2 phi / (du dr) = 2 lambda (1-u)^(r-2)
///                        [ (2r-1) + r (r-1) ln(1-u) ] / (1-p)^2`.
///
/// Positive below [`r_flip_level`] and negative above it: raising the
/// order steepens the weight early in the window but flattens it at the
/// very top, where the extra survival power dominates.
pub fn d2phi_du_dr(params: &ParamSet, u: f64) -> Result<f64, SensError> {
    let survival = match window_position(params, u)? {
        None => return Ok(0.0),
        Some(s) => s,
    };
    let (r, lambda) = (params.r(), params.lambda());
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let q = 1.0 - params.p();
    if survival <= 0.0 {
        // The bracket runs to -inf while the power runs to zero (r > 2),
        // one (r = 2), or +inf (r < 2); the products settle at these
        // limits.
        return Ok(if r > 2.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let bracket = (2.0 * r - 1.0) + r * (r - 1.0) * fp::ln(survival);
    Ok(2.0 * lambda * fp::powf(survival, r - 2.0) * bracket / (q * q))
}

/// The level `1 - exp(-(2r-1) / (r (r-1)))` where [`d2phi_du_dr`] changes
/// sign. Depends only on the order; it may land below `p`, in which case
/// the mixed partial keeps a single sign on the window.
pub fn r_flip_level(r: f64) -> Result<f64, ParamError> {
    check_r(r)?;
    Ok(1.0 - fp::exp(-(2.0 * r - 1.0) / (r * (r - 1.0))))
}

/// Sensitivity of the coherence bound to the level:
/// `d B / d p = (r-2) (1-p)^(1-r) / (2 (r-1))`.
///
/// Positive for `r > 2`, negative for `r < 2`, zero at `r = 2` where the
/// bound is the constant `1/2`.
pub fn bound_dp(r: f64, p: f64) -> Result<f64, ParamError> {
    check_r(r)?;
    check_p(p)?;
    Ok((r - 2.0) * fp::powf(1.0 - p, 1.0 - r) / (2.0 * (r - 1.0)))
}

/// Sensitivity of the coherence bound to the order:
/// `d B / d r = -[ 1 + (r-1) ln(1-p) ] / (2 (r-1)^2 (1-p)^(r-2))`.
pub fn bound_dr(r: f64, p: f64) -> Result<f64, ParamError> {
    check_r(r)?;
    check_p(p)?;
    let q = 1.0 - p;
    let denom = 2.0 * (r - 1.0) * (r - 1.0) * fp::powf(q, r - 2.0);
    Ok(-(1.0 + (r - 1.0) * fp::ln(q)) / denom)
}

/// The order `r = 1 - 1/ln(1-p)` at which [`bound_dr`] vanishes: the
/// coherence bound falls in `r` below it and rises above it.
pub fn r_critical(p: f64) -> Result<f64, ParamError> {
    check_p(p)?;
    Ok(1.0 - 1.0 / fp::ln(1.0 - p))
}

/// Adaptive central difference: halves the step until two successive
/// estimates agree to a relative `1e-6` (or the step hits `1e-9`, whichever
/// comes first) and returns the last estimate.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, initial_step: f64) -> f64 {
    let mut step = initial_step;
    let mut prev = (f(x + step) - f(x - step)) / (2.0 * step);
    loop {
        step *= 0.5;
        if step < 1e-9 {
            return prev;
        }
        let next = (f(x + step) - f(x - step)) / (2.0 * step);
        let scale = {
            let a = fp::abs(next);
            let b = fp::abs(prev);
            let m = if a > b { a } else { b };
            if m > 1e-12 {
                m
            } else {
                1e-12
            }
        };
        if fp::abs(next - prev) <= 1e-6 * scale {
            return next;
        }
        prev = next;
    }
}

/// Every sensitivity at one point, bundled for reporting.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SensitivityReport {
    pub u: f64,
    pub phi: f64,
    pub dphi_du: f64,
    pub dphi_dlambda: f64,
    pub dphi_dp: f64,
    pub dphi_dr: f64,
    pub d2phi_du_dp: f64,
    pub d2phi_du_dr: f64,
    /// Where the loading derivative turns positive.
    pub lambda_root: f64,
    /// Where the level derivative turns non-negative, if it does.
    pub p_threshold: Option<f64>,
    /// Where the order mixed partial flips sign.
    pub r_flip_level: f64,
    /// The coherence bound and its own sensitivities.
    pub lambda_max: f64,
    pub bound_dp: f64,
    pub bound_dr: f64,
    pub r_critical: f64,
}

/// Evaluates every derivative and threshold at `u`.
pub fn sensitivity_report(params: &ParamSet, u: f64) -> Result<SensitivityReport, SensError> {
    let (p, r) = (params.p(), params.r());
    Ok(SensitivityReport {
        u,
        phi: params.phi(u),
        dphi_du: dphi_du(params, u)?,
        dphi_dlambda: dphi_dlambda(params, u)?,
        dphi_dp: dphi_dp(params, u)?,
        dphi_dr: dphi_dr(params, u)?,
        d2phi_du_dp: d2phi_du_dp(params, u)?,
        d2phi_du_dr: d2phi_du_dr(params, u)?,
        lambda_root: lambda_root(params),
        p_threshold: p_threshold(params),
        r_flip_level: r_flip_level(r)?,
        lambda_max: params.lambda_max(),
        bound_dp: bound_dp(r, p)?,
        bound_dr: bound_dr(r, p)?,
        r_critical: r_critical(p)?,
    })
}
