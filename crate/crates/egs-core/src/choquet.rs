//! Signed Choquet integration against spectral weights.
//!
//! The engine evaluates integrals of the form `∫ q(u) w(u) du` over the unit
//! interval, where `q` is a quantile function (the left-continuous
//! generalized inverse of a distribution) and `w` is a signed weight. The
//! weight's support and breakpoints drive the segmentation: quadrature never
//! leaves the support, and every kink becomes a panel boundary so the
//! adaptive rule only ever sees smooth integrands.
//!
//! Quantiles of unbounded distributions diverge at the endpoints of the unit
//! interval. Panels touching such an endpoint are mapped through
//! `u = 1 - exp(-t)` (or its mirror at the lower end) composed with a
//! rational compactification of the half-line, which turns an integrable
//! endpoint singularity into a smooth decaying integrand.

use crate::error::QuadError;
use crate::fp;
use crate::quadrature::{integrate, QuadOptions};
use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// Offset keeping quantile evaluations strictly inside the open unit
/// interval.
const ENDPOINT_CLAMP: f64 = 1e-15;

/// Default absolute tolerance when every tail of the model is bounded.
pub const DEFAULT_TOL_BOUNDED: f64 = 1e-10;

/// Default absolute tolerance when a tail is unbounded; the substituted
/// integrands are well behaved but their derivatives are larger, so a little
/// headroom is left.
pub const DEFAULT_TOL_UNBOUNDED: f64 = 1e-8;

/// Marks which endpoints of the unit interval the quantile diverges at.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TailFlags {
    /// The quantile tends to negative infinity as `u -> 0+`.
    pub lower_unbounded: bool,
    /// The quantile tends to positive infinity as `u -> 1-`.
    pub upper_unbounded: bool,
}

impl TailFlags {
    /// Both tails bounded.
    pub const BOUNDED: TailFlags = TailFlags {
        lower_unbounded: false,
        upper_unbounded: false,
    };

    /// Both tails unbounded.
    pub const UNBOUNDED: TailFlags = TailFlags {
        lower_unbounded: true,
        upper_unbounded: true,
    };

    /// The default integration tolerance appropriate for these tails.
    pub fn default_tol(self) -> f64 {
        if self.lower_unbounded || self.upper_unbounded {
            DEFAULT_TOL_UNBOUNDED
        } else {
            DEFAULT_TOL_BOUNDED
        }
    }
}

/// A distribution presented through its quantile function.
///
/// `quantile` is the left-continuous generalized inverse
/// `inf { x : F(x) >= u }`, the same convention used for value-at-risk, and
/// is only ever called strictly inside the open unit interval.
pub trait QuantileModel {
    /// The quantile at probability level `u ∈ (0, 1)`.
    fn quantile(&self, u: f64) -> f64;

    /// Which endpoints the quantile diverges at. Defaults to bounded.
    fn tail_flags(&self) -> TailFlags {
        TailFlags::BOUNDED
    }
}

impl<M: QuantileModel + ?Sized> QuantileModel for &M {
    fn quantile(&self, u: f64) -> f64 {
        (**self).quantile(u)
    }
    fn tail_flags(&self) -> TailFlags {
        (**self).tail_flags()
    }
}

/// A signed weight on the unit interval with known support and kinks.
pub struct WeightFunction {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
    total_mass: f64,
    breakpoints: Vec<f64>,
}

impl WeightFunction {
    /// Builds a weight and measures its total mass by quadrature.
    ///
    /// `support` is the closed interval outside which the weight vanishes;
    /// `breakpoints` lists interior points where the weight or its
    /// derivative jumps, so integration can split there.
    pub fn new<F>(eval: F, support: (f64, f64), breakpoints: Vec<f64>) -> Result<Self, QuadError>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        debug_assert!(
            0.0 <= support.0 && support.0 < support.1 && support.1 <= 1.0,
            "support must be a sub-interval of [0, 1]"
        );
        let opts = QuadOptions::default().with_abs_tol(1e-12);
        let mut mass = 0.0;
        let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
        cuts.push(support.0);
        cuts.extend(
            breakpoints
                .iter()
                .copied()
                .filter(|&u| u > support.0 && u < support.1),
        );
        cuts.push(support.1);
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("breakpoints must not be NaN"));
        for pair in cuts.windows(2) {
            mass += integrate(&eval, pair[0], pair[1], &opts)?.value;
        }
        Ok(WeightFunction {
            eval: Box::new(eval),
            support,
            total_mass: mass,
            breakpoints,
        })
    }

    /// Builds a weight whose total mass is already known in closed form,
    /// skipping the measuring quadrature.
    pub fn with_total_mass<F>(
        eval: F,
        support: (f64, f64),
        breakpoints: Vec<f64>,
        total_mass: f64,
    ) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        debug_assert!(
            0.0 <= support.0 && support.0 < support.1 && support.1 <= 1.0,
            "support must be a sub-interval of [0, 1]"
        );
        WeightFunction {
            eval: Box::new(eval),
            support,
            total_mass,
            breakpoints,
        }
    }

    /// The weight at `u`, identically zero outside the support.
    pub fn eval(&self, u: f64) -> f64 {
        if u < self.support.0 || u > self.support.1 {
            0.0
        } else {
            (self.eval)(u)
        }
    }

    /// The closed interval outside which the weight vanishes.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// The cached integral of the weight over the unit interval.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Interior points where the weight or its derivative jumps.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// A distortion `h` of finite variation, presented with its density `h'`.
///
/// Only piecewise-differentiable distortions are supported: `density` must
/// be valid away from the listed kinks. General finite-variation distortions
/// without a density are out of scope.
pub struct DistortionFunction {
    h: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    kinks: Vec<f64>,
}

impl DistortionFunction {
    /// Builds a distortion from `h`, its density `h'`, and the interior
    /// kinks where `h'` jumps. `h(0)` must vanish.
    pub fn new<H, D>(h: H, density: D, kinks: Vec<f64>) -> Self
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        debug_assert!(fp::abs(h(0.0)) <= 1e-12, "a distortion must vanish at 0");
        DistortionFunction {
            h: Box::new(h),
            density: Arc::new(density),
            kinks,
        }
    }

    /// The distortion value at `u`.
    pub fn h(&self, u: f64) -> f64 {
        (self.h)(u)
    }

    /// The distortion density `h'(u)` away from kinks.
    pub fn density(&self, u: f64) -> f64 {
        (self.density)(u)
    }

    /// Interior points where the density jumps.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }
}

/// How a panel touching an endpoint of the unit interval is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PanelKind {
    /// Direct integration in `u`.
    Plain,
    /// `u = exp(-t)` for a quantile diverging at `u -> 0+`.
    LowerTail,
    /// `u = 1 - exp(-t)` for a quantile diverging at `u -> 1-`.
    UpperTail,
}

/// The signed Choquet integral `∫ q(u) w(u) du` over the weight's support.
///
/// The estimated absolute error of the returned value is at most `tol`.
/// Non-convergence surfaces as [`QuadError::NotConverged`] carrying the best
/// estimate, and a NaN from the integrand as [`QuadError::NonFinite`].
pub fn choquet_integral<Q>(q: &Q, w: &WeightFunction, tol: f64) -> Result<f64, QuadError>
where
    Q: QuantileModel + ?Sized,
{
    debug_assert!(tol > 0.0, "tolerance must be positive");
    let flags = q.tail_flags();
    let (lo, hi) = w.support();

    // Panel boundaries: support endpoints, weight kinks, and a split keeping
    // any panel from touching both endpoints of the unit interval at once.
    let mut cuts: Vec<f64> = Vec::with_capacity(w.breakpoints().len() + 3);
    cuts.push(lo);
    cuts.extend(w.breakpoints().iter().copied().filter(|&u| u > lo && u < hi));
    if flags.lower_unbounded && flags.upper_unbounded && lo == 0.0 && hi == 1.0 {
        cuts.push(0.5);
    }
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("breakpoints must not be NaN"));
    cuts.dedup();

    let panels = cuts.len() - 1;
    let opts = QuadOptions::default().with_abs_tol(tol / panels as f64);

    let mut total = 0.0;
    let mut bound = 0.0;
    let mut exhausted = false;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let kind = if flags.lower_unbounded && a == 0.0 {
            PanelKind::LowerTail
        } else if flags.upper_unbounded && b == 1.0 {
            PanelKind::UpperTail
        } else {
            PanelKind::Plain
        };
        match integrate_panel(q, w, a, b, kind, &opts) {
            Ok(result) => {
                total += result.value;
                bound += result.error_bound;
            }
            Err(QuadError::NotConverged {
                estimate,
                error_bound,
            }) => {
                total += estimate;
                bound += error_bound;
                exhausted = true;
            }
            Err(e) => return Err(e),
        }
    }
    if exhausted {
        Err(QuadError::NotConverged {
            estimate: total,
            error_bound: bound,
        })
    } else {
        Ok(total)
    }
}

/// One panel of the Choquet integral, transformed as `kind` dictates.
fn integrate_panel<Q>(
    q: &Q,
    w: &WeightFunction,
    a: f64,
    b: f64,
    kind: PanelKind,
    opts: &QuadOptions,
) -> Result<crate::quadrature::QuadResult, QuadError>
where
    Q: QuantileModel + ?Sized,
{
    let sample = |u: f64| {
        let clamped = u.clamp(ENDPOINT_CLAMP, 1.0 - ENDPOINT_CLAMP);
        q.quantile(clamped) * w.eval(u)
    };
    match kind {
        PanelKind::Plain => integrate(sample, a, b, opts),
        PanelKind::UpperTail => {
            // u = 1 - exp(-t) maps [a, b] to [t0, t1] with t1 infinite when
            // b = 1; compactify the half-line with t = t0 + s / (1 - s).
            let t0 = -fp::ln_1p(-a);
            let g = move |s: f64| {
                let one_minus_s = 1.0 - s;
                let t = t0 + s / one_minus_s;
                // exp(-t) underflows long before 1/(1-s)^2 overflows; taking
                // it first keeps the product an exact zero instead of NaN.
                let density = fp::exp(-t);
                if density == 0.0 {
                    return 0.0;
                }
                sample(1.0 - density) * density / (one_minus_s * one_minus_s)
            };
            if b == 1.0 {
                integrate(g, 0.0, 1.0, opts)
            } else {
                let t1 = -fp::ln_1p(-b);
                let s1 = (t1 - t0) / (1.0 + t1 - t0);
                integrate(g, 0.0, s1, opts)
            }
        }
        PanelKind::LowerTail => {
            // Mirror of the upper substitution: u = exp(-t) with t growing
            // away from b, so the panel [a, b] becomes [t0, -ln a].
            let t0 = -fp::ln(b);
            let g = move |s: f64| {
                let one_minus_s = 1.0 - s;
                let t = t0 + s / one_minus_s;
                let density = fp::exp(-t);
                if density == 0.0 {
                    return 0.0;
                }
                sample(density) * density / (one_minus_s * one_minus_s)
            };
            if a == 0.0 {
                integrate(g, 0.0, 1.0, opts)
            } else {
                let t1 = -fp::ln(a);
                let s1 = (t1 - t0) / (1.0 + t1 - t0);
                integrate(g, 0.0, s1, opts)
            }
        }
    }
}

/// The Choquet integral written against a distortion: `∫ q(u) dh(u)`,
/// evaluated as `∫ q(u) h'(u) du` with panels split at the kinks of `h`.
pub fn choquet_from_distortion<Q>(
    q: &Q,
    h: &DistortionFunction,
    tol: f64,
) -> Result<f64, QuadError>
where
    Q: QuantileModel + ?Sized,
{
    let kinks = h.kinks().to_vec();
    let mass = h.h(1.0) - h.h(0.0);
    let density = Arc::clone(&h.density);
    let w = WeightFunction::with_total_mass(move |u| density(u), (0.0, 1.0), kinks, mass);
    choquet_integral(q, &w, tol)
}
