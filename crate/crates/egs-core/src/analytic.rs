//! Closed-form tail measures for spherical location-scale families.
//!
//! A spherical distribution is described by its density generator `g`: the
//! density is `f(z) = c g(z^2/2)` with normalizing constant `c`. The tail
//! generator `Gbar(y) = c ∫_y^∞ g(x) dx` drives everything here: the tail
//! average beyond level `p` is `Gbar(z_p^2/2) / (1 - p)` exactly, and the
//! tail extension of the mean difference reduces to a single semi-infinite
//! integral of `(1 - F(z))^(r-2) Gbar(z^2/2) f(z)`.
//!
//! Built-in specs: the symmetric uniform on `[-1, 1]`, the standard normal,
//! and the Student-t parameterized by `theta` (in degrees-of-freedom terms,
//! `theta = (n + 1) / 2`).

use crate::choquet::{QuantileModel, TailFlags};
use crate::error::{MeasureError, ParamError};
use crate::fp;
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{
    ln_beta, normal_cdf, normal_pdf, normal_quantile, student_t_cdf, student_t_quantile,
    FRAC_1_SQRT_2PI,
};

/// A spherical distribution presented through its density generator.
pub trait Spherical {
    /// The density generator `g(z)` for `z >= 0`.
    fn density_generator(&self, z: f64) -> f64;

    /// The normalizing constant `c` making `c g(z^2/2)` a density.
    fn normalizing_constant(&self) -> f64;

    /// The tail generator `Gbar(y) = c ∫_y^∞ g(x) dx`.
    fn tail_generator(&self, y: f64) -> f64;

    /// The variance, when finite.
    fn variance(&self) -> Option<f64>;

    /// The distribution function.
    fn cdf(&self, z: f64) -> f64;

    /// The quantile function.
    fn quantile(&self, p: f64) -> f64;

    /// The upper endpoint of the support (`+∞` for unbounded tails).
    fn upper_support(&self) -> f64;

    /// The density `f(z) = c g(z^2/2)`.
    fn pdf(&self, z: f64) -> f64 {
        self.normalizing_constant() * self.density_generator(0.5 * z * z)
    }
}

/// The symmetric uniform on `[-1, 1]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct StdUniform;

impl Spherical for StdUniform {
    fn density_generator(&self, z: f64) -> f64 {
        if z <= 0.5 {
            1.0
        } else {
            0.0
        }
    }

    fn normalizing_constant(&self) -> f64 {
        0.5
    }

    fn tail_generator(&self, y: f64) -> f64 {
        if y >= 0.5 {
            0.0
        } else {
            0.25 - 0.5 * y
        }
    }

    fn variance(&self) -> Option<f64> {
        Some(1.0 / 3.0)
    }

    fn cdf(&self, z: f64) -> f64 {
        if z <= -1.0 {
            0.0
        } else if z >= 1.0 {
            1.0
        } else {
            0.5 * (z + 1.0)
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        2.0 * p - 1.0
    }

    fn upper_support(&self) -> f64 {
        1.0
    }
}

impl QuantileModel for StdUniform {
    fn quantile(&self, u: f64) -> f64 {
        2.0 * u - 1.0
    }
}

/// The standard normal.
#[derive(Clone, Copy, Debug, Default)]
pub struct StdNormal;

impl Spherical for StdNormal {
    fn density_generator(&self, z: f64) -> f64 {
        fp::exp(-z)
    }

    fn normalizing_constant(&self) -> f64 {
        FRAC_1_SQRT_2PI
    }

    fn tail_generator(&self, y: f64) -> f64 {
        // c ∫_y^∞ e^(-x) dx = c e^(-y), so Gbar(z^2/2) is the density
        // itself.
        FRAC_1_SQRT_2PI * fp::exp(-y)
    }

    fn variance(&self) -> Option<f64> {
        Some(1.0)
    }

    fn cdf(&self, z: f64) -> f64 {
        normal_cdf(z)
    }

    fn quantile(&self, p: f64) -> f64 {
        normal_quantile(p)
    }

    fn upper_support(&self) -> f64 {
        f64::INFINITY
    }

    fn pdf(&self, z: f64) -> f64 {
        normal_pdf(z)
    }
}

impl QuantileModel for StdNormal {
    fn quantile(&self, u: f64) -> f64 {
        normal_quantile(u)
    }

    fn tail_flags(&self) -> TailFlags {
        TailFlags::UNBOUNDED
    }
}

/// The Student-t in its `theta` parameterization: density
/// `c_theta (1 + z^2 / (2 k_theta))^(-theta)` with `k_theta = theta - 1/2`.
///
/// In degrees-of-freedom terms, `theta = (n + 1) / 2` and `k_theta = n / 2`.
/// The mean is finite for `theta > 1` and the variance for `theta > 3/2`.
#[derive(Clone, Copy, Debug)]
pub struct StudentT {
    theta: f64,
    k_theta: f64,
    c_theta: f64,
}

impl StudentT {
    /// Builds the spec; the density exists for `theta > 1/2`.
    pub fn new(theta: f64) -> Result<Self, ParamError> {
        if !(theta > 0.5) {
            return Err(ParamError::StudentTParameter {
                value: theta,
                minimum: 0.5,
            });
        }
        let k_theta = theta - 0.5;
        let c_theta = normalizer(theta, k_theta);
        Ok(StudentT {
            theta,
            k_theta,
            c_theta,
        })
    }

    /// Builds the spec from degrees of freedom: `theta = (n + 1) / 2`.
    pub fn from_dof(n: f64) -> Result<Self, ParamError> {
        if !(n > 0.0) {
            return Err(ParamError::StudentTParameter {
                value: (n + 1.0) / 2.0,
                minimum: 0.5,
            });
        }
        StudentT::new((n + 1.0) / 2.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn k_theta(&self) -> f64 {
        self.k_theta
    }

    pub fn c_theta(&self) -> f64 {
        self.c_theta
    }

    /// The equivalent degrees of freedom, `n = 2 theta - 1`.
    pub fn dof(&self) -> f64 {
        2.0 * self.theta - 1.0
    }
}

/// `c_theta = 1 / (sqrt(2 k) B(theta - 1/2, 1/2))`, through log-gamma so
/// large shapes neither overflow nor lose the leading digits.
fn normalizer(theta: f64, k_theta: f64) -> f64 {
    fp::exp(-0.5 * fp::ln(2.0 * k_theta) - ln_beta(theta - 0.5, 0.5))
}

impl Spherical for StudentT {
    fn density_generator(&self, z: f64) -> f64 {
        fp::powf(1.0 + z / self.k_theta, -self.theta)
    }

    fn normalizing_constant(&self) -> f64 {
        self.c_theta
    }

    fn tail_generator(&self, y: f64) -> f64 {
        debug_assert!(
            self.theta > 1.0,
            "the tail generator integral diverges without a finite mean"
        );
        self.c_theta * self.k_theta / (self.theta - 1.0)
            * fp::powf(1.0 + y / self.k_theta, -(self.theta - 1.0))
    }

    fn variance(&self) -> Option<f64> {
        if self.theta > 1.5 {
            Some((self.theta - 0.5) / (self.theta - 1.5))
        } else {
            None
        }
    }

    fn cdf(&self, z: f64) -> f64 {
        student_t_cdf(self.dof(), z)
    }

    fn quantile(&self, p: f64) -> f64 {
        student_t_quantile(self.dof(), p)
    }

    fn upper_support(&self) -> f64 {
        f64::INFINITY
    }
}

impl QuantileModel for StudentT {
    fn quantile(&self, u: f64) -> f64 {
        student_t_quantile(self.dof(), u)
    }

    fn tail_flags(&self) -> TailFlags {
        TailFlags::UNBOUNDED
    }
}

/// `alpha + beta Z` for a spherical base `Z`; the tail average shifts and
/// scales with it while the tail extension only scales.
#[derive(Clone, Copy, Debug)]
pub struct LocationScale<S> {
    pub base: S,
    pub alpha: f64,
    pub beta: f64,
}

impl<S: Spherical> LocationScale<S> {
    pub fn new(base: S, alpha: f64, beta: f64) -> Self {
        debug_assert!(beta > 0.0, "the scale must be positive");
        LocationScale { base, alpha, beta }
    }

    /// Closed-form tail average: `alpha + beta ES_p(Z)`.
    pub fn es(&self, p: f64) -> Result<f64, ParamError> {
        Ok(self.alpha + self.beta * es_elliptical(&self.base, p)?)
    }

    /// Tail extension: `beta TEG_(r,p)(Z)`.
    pub fn teg(&self, r: f64, p: f64, tol: f64) -> Result<f64, MeasureError> {
        Ok(self.beta * teg_elliptical(&self.base, r, p, tol)?)
    }
}

impl<S: Spherical> QuantileModel for LocationScale<S> {
    fn quantile(&self, u: f64) -> f64 {
        self.alpha + self.beta * self.base.quantile(u)
    }

    fn tail_flags(&self) -> TailFlags {
        if self.base.upper_support().is_finite() {
            TailFlags::BOUNDED
        } else {
            TailFlags::UNBOUNDED
        }
    }
}

fn check_p(p: f64) -> Result<(), ParamError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(ParamError::ProbabilityLevel {
            value: p,
            allow_zero: false,
        })
    }
}

fn check_r(r: f64) -> Result<(), ParamError> {
    if r > 1.0 {
        Ok(())
    } else {
        Err(ParamError::RiskAversion { value: r })
    }
}

/// The tail average of a spherical distribution: `Gbar(z_p^2/2) / (1 - p)`.
pub fn es_elliptical<S: Spherical>(spec: &S, p: f64) -> Result<f64, ParamError> {
    check_p(p)?;
    let zp = spec.quantile(p);
    Ok(spec.tail_generator(0.5 * zp * zp) / (1.0 - p))
}

/// The tail extension of the mean difference for a spherical distribution:
///
/// ```text
/// TEG = 2 r (r-1) / (1-p)^2 * ∫_(z_p)^∞ (1 - F(z))^(r-2) Gbar(z^2/2) f(z) dz
///     - 2 (r-1) (1-p)^(r-2) ES_p
/// ```
///
/// obtained from the spectral form by integrating `z f(z) dz = -d Gbar(z^2/2)`
/// by parts against `(1 - F)^(r-1)`.  The integral runs to the upper support
/// endpoint; unbounded tails are compactified with `z = z_p + s / (1 - s)`.
pub fn teg_elliptical<S: Spherical>(
    spec: &S,
    r: f64,
    p: f64,
    tol: f64,
) -> Result<f64, MeasureError> {
    check_r(r)?;
    check_p(p)?;
    let zp = spec.quantile(p);
    let es = es_elliptical(spec, p)?;

    let core = |z: f64| {
        let sf = 1.0 - spec.cdf(z);
        // The survival can underflow to zero while the exponent is
        // negative; the true product limit is zero, so short-circuit
        // before 0^negative manufactures an infinity.
        if sf <= 0.0 {
            return 0.0;
        }
        let gbar = spec.tail_generator(0.5 * z * z);
        if gbar <= 0.0 {
            return 0.0;
        }
        fp::powf(sf, r - 2.0) * gbar * spec.pdf(z)
    };

    let opts = QuadOptions::default().with_abs_tol(tol);
    let upper = spec.upper_support();
    let integral = if upper.is_finite() {
        integrate(core, zp, upper, &opts)
    } else {
        let g = move |s: f64| {
            let one_minus_s = 1.0 - s;
            let z = zp + s / one_minus_s;
            if !z.is_finite() {
                return 0.0;
            }
            core(z) / (one_minus_s * one_minus_s)
        };
        integrate(g, 0.0, 1.0, &opts)
    }
    ?.value;

    let one_minus_p = 1.0 - p;
    let front = 2.0 * r * (r - 1.0) / (one_minus_p * one_minus_p);
    let tail = -2.0 * (r - 1.0) * fp::powf(one_minus_p, r - 2.0) * es;
    Ok(front * integral + tail)
}

/// Closed-form tail average of the symmetric uniform on `[-1, 1]`.
pub fn es_uniform(p: f64) -> Result<f64, ParamError> {
    check_p(p)?;
    let zp = 2.0 * p - 1.0;
    Ok((1.0 - zp * zp) / (4.0 * (1.0 - p)))
}

/// Closed-form tail extension of the symmetric uniform on `[-1, 1]`:
///
/// ```text
/// TEG = 2 (r-1) (1-p)^(r-1) / (r+1)
/// ```
///
/// The spectral integral is a polynomial in `u` here, so it evaluates
/// exactly: with `q = 1 - p` the spherical-integral term contributes
/// `2(r-1) q^(r-2) - 2r(r-1) q^(r-1) / (r+1)` and the boundary term
/// `-2(r-1) q^(r-2) ES_p` with `ES_p = p`, which telescopes to the form
/// above.  It is manifestly non-negative and vanishes as `p -> 1`.
pub fn teg_uniform(r: f64, p: f64) -> Result<f64, ParamError> {
    check_r(r)?;
    check_p(p)?;
    Ok(2.0 * (r - 1.0) * fp::powf(1.0 - p, r - 1.0) / (r + 1.0))
}

/// Closed-form tail average of the standard normal: `pdf(z_p) / (1 - p)`.
pub fn es_normal(p: f64) -> Result<f64, ParamError> {
    check_p(p)?;
    Ok(normal_pdf(normal_quantile(p)) / (1.0 - p))
}

/// Tail extension of the standard normal, by the spherical integral with
/// `Gbar(z^2/2)` equal to the density.
pub fn teg_normal(r: f64, p: f64, tol: f64) -> Result<f64, MeasureError> {
    teg_elliptical(&StdNormal, r, p, tol)
}

/// Closed-form tail average of the Student-t: requires a finite mean,
/// `theta > 1`.
pub fn es_student_t(theta: f64, p: f64) -> Result<f64, ParamError> {
    if !(theta > 1.0) {
        return Err(ParamError::StudentTParameter {
            value: theta,
            minimum: 1.0,
        });
    }
    check_p(p)?;
    let spec = StudentT::new(theta)?;
    es_elliptical(&spec, p)
}

/// Tail extension of the Student-t.
///
/// The spherical reduction expresses `Gbar` through the density one shape
/// step down, at `theta - 1`; that density only exists for
/// `theta - 1 > 1/2`, so shapes at or below `3/2` are rejected outright
/// even though the tail average exists on `(1, 3/2]`.
pub fn teg_student_t(theta: f64, r: f64, p: f64, tol: f64) -> Result<f64, MeasureError> {
    if !(theta > 1.5) {
        return Err(MeasureError::Param(ParamError::StudentTParameter {
            value: theta,
            minimum: 1.5,
        }));
    }
    let spec = StudentT::new(theta).map_err(MeasureError::Param)?;
    teg_elliptical(&spec, r, p, tol)
}
