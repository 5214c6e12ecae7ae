//! Scalar special functions.
//!
//! Error-function and log-gamma primitives are delegated to `libm` (double
//! precision, ~1 ulp). On top of those this module builds the standard normal
//! CDF/quantile pair, the regularized incomplete beta function, and the
//! Student-t CDF/density/quantile, which the closed-form layer and the
//! quadrature integrands rely on.

use crate::fp;

/// 1 / sqrt(2 pi), the height of the standard normal density at zero.
pub const FRAC_1_SQRT_2PI: f64 = 0.3989422804014326779;

/// sqrt(2 pi).
pub const SQRT_2PI: f64 = 2.5066282746310005024;

/// Error function.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Natural log of the gamma function for positive arguments.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Natural log of the beta function, `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * fp::exp(-0.5 * z * z)
}

/// Standard normal CDF via the complementary error function.
///
/// ```
/// let p = egs_core::special::normal_cdf(1.959963984540054);
/// assert!((p - 0.975).abs() < 1e-15);
/// ```
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * core::f64::consts::FRAC_1_SQRT_2)
}

// Rational approximation coefficients for the normal quantile (relative error
// below 1.2e-9 everywhere), refined to full precision by one Halley step
// against the erfc-based CDF.
const NQ_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const NQ_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const NQ_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const NQ_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

fn normal_quantile_tail(q: f64) -> f64 {
    (((((NQ_C[0] * q + NQ_C[1]) * q + NQ_C[2]) * q + NQ_C[3]) * q + NQ_C[4]) * q + NQ_C[5])
        / ((((NQ_D[0] * q + NQ_D[1]) * q + NQ_D[2]) * q + NQ_D[3]) * q + 1.0)
}

/// Standard normal quantile (inverse CDF).
///
/// Accurate to roughly 1e-15 relative over `(0, 1)`; returns +-infinity at
/// the endpoints and NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }

    const P_LOW: f64 = 0.02425;
    let mut x = if p < P_LOW {
        normal_quantile_tail(fp::sqrt(-2.0 * fp::ln(p)))
    } else if p > 1.0 - P_LOW {
        -normal_quantile_tail(fp::sqrt(-2.0 * fp::ln_1p(-p)))
    } else {
        let q = p - 0.5;
        let r = q * q;
        q * (((((NQ_A[0] * r + NQ_A[1]) * r + NQ_A[2]) * r + NQ_A[3]) * r + NQ_A[4]) * r + NQ_A[5])
            / (((((NQ_B[0] * r + NQ_B[1]) * r + NQ_B[2]) * r + NQ_B[3]) * r + NQ_B[4]) * r + 1.0)
    };

    // One Halley step against the high-precision CDF.
    let e = normal_cdf(x) - p;
    let u = e * SQRT_2PI * fp::exp(0.5 * x * x);
    if u.is_finite() {
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0` and
/// `x` in `[0, 1]`, evaluated by the standard continued fraction.
///
/// ```
/// // I_x(1, 1) is the identity.
/// assert!((egs_core::special::reg_inc_beta(1.0, 1.0, 0.3) - 0.3).abs() < 1e-15);
/// ```
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * fp::ln(x) + b * fp::ln_1p(-x);
    let front = fp::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cont_frac(a, b, x) / a
    } else {
        1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cont_frac(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 3e-16;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fp::abs(d) < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if fp::abs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if fp::abs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if fp::abs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if fp::abs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fp::abs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Student-t density with `nu` degrees of freedom.
pub fn student_t_pdf(nu: f64, t: f64) -> f64 {
    debug_assert!(nu > 0.0);
    let ln_norm = ln_gamma(0.5 * (nu + 1.0))
        - ln_gamma(0.5 * nu)
        - 0.5 * fp::ln(nu * core::f64::consts::PI);
    fp::exp(ln_norm - 0.5 * (nu + 1.0) * fp::ln_1p(t * t / nu))
}

/// Student-t CDF with `nu` degrees of freedom, via the incomplete beta
/// function.
pub fn student_t_cdf(nu: f64, t: f64) -> f64 {
    debug_assert!(nu > 0.0);
    if t == 0.0 {
        return 0.5;
    }
    let t2 = t * t;
    let tail = if t2 >= nu {
        // Far tail: nu / (nu + t^2) <= 1/2 sits safely away from 1.
        0.5 * reg_inc_beta(0.5 * nu, 0.5, nu / (nu + t2))
    } else {
        // Near the centre nu / (nu + t^2) crowds against 1 and the 1 - x
        // formed inside the incomplete beta loses most of its digits, so
        // reflect and hand over the exactly-formed complement instead.
        0.5 * (1.0 - reg_inc_beta(0.5, 0.5 * nu, t2 / (nu + t2)))
    };
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Student-t quantile with `nu` degrees of freedom: monotone bracketing of
/// the CDF followed by Newton refinement with the density.
///
/// Returns +-infinity at the endpoints and NaN outside `[0, 1]`.
pub fn student_t_quantile(nu: f64, p: f64) -> f64 {
    debug_assert!(nu > 0.0);
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -student_t_quantile(nu, 1.0 - p);
    }

    // Bracket [lo, hi] with F(lo) < p <= F(hi).
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    while student_t_cdf(nu, hi) < p {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }

    // Tighten by bisection, then polish with Newton steps kept inside the
    // bracket.
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(nu, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..16 {
        let f = student_t_cdf(nu, x) - p;
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = f / student_t_pdf(nu, x);
        if !step.is_finite() {
            break;
        }
        if fp::abs(step) <= 1e-15 * (1.0 + fp::abs(x)) {
            x -= step;
            break;
        }
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_basics() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-15);
        assert_eq!(erf(-2.0), -erf(2.0));
        assert!((erfc(0.0) - 1.0).abs() < 1e-16);
    }

    #[test]
    fn normal_cdf_symmetry_and_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for &z in &[0.1, 0.5, 1.0, 2.0, 3.5, 6.0] {
            assert!((normal_cdf(z) + normal_cdf(-z) - 1.0).abs() < 1e-15);
        }
        assert!((normal_cdf(1.2815515655446004) - 0.90).abs() < 1e-15);
        assert!((normal_cdf(2.3263478740408408) - 0.99).abs() < 1e-15);
    }

    #[test]
    fn normal_quantile_reference_values() {
        // Standard normal quantiles at the usual confidence levels.
        let cases = [
            (0.90, 1.2815515655446004),
            (0.95, 1.6448536269514722),
            (0.975, 1.959963984540054),
            (0.99, 2.3263478740408408),
            (0.995, 2.5758293035489004),
            (0.999, 3.0902323061678136),
        ];
        for (p, z) in cases {
            assert!(
                (normal_quantile(p) - z).abs() < 1e-12,
                "quantile({p}) = {} != {z}",
                normal_quantile(p)
            );
            assert!((normal_quantile(1.0 - p) + z).abs() < 1e-12);
        }
        assert_eq!(normal_quantile(0.5), 0.0);
    }

    #[test]
    fn normal_quantile_round_trip() {
        let mut z = -8.0;
        while z <= 8.0 {
            let p = normal_cdf(z);
            let back = normal_quantile(p);
            // Near the upper tail, p carries only ~ulp(1)/pdf(z) of
            // information about z, so the round trip cannot beat that.
            let tol = 1e-13 * (1.0 + z.abs()) + 3e-16 / normal_pdf(z);
            assert!(
                (back - z).abs() < tol,
                "round trip failed at z = {z}: {back}"
            );
            z += 0.173;
        }
        assert_eq!(normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(normal_quantile(1.0), f64::INFINITY);
        assert!(normal_quantile(-0.1).is_nan());
    }

    #[test]
    fn ln_beta_identities() {
        // B(1/2, 1/2) = pi, B(1, b) = 1/b.
        assert!((ln_beta(0.5, 0.5) - core::f64::consts::PI.ln()).abs() < 1e-14);
        for &b in &[0.5, 1.0, 2.5, 7.0] {
            assert!((ln_beta(1.0, b) - (1.0 / b).ln()).abs() < 1e-13);
        }
        // Symmetry.
        assert!((ln_beta(2.5, 0.5) - ln_beta(0.5, 2.5)).abs() < 1e-15);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1,1) = x and I_x(2,2) = x^2 (3 - 2x).
        for &x in &[0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            assert!((reg_inc_beta(1.0, 1.0, x) - x).abs() < 1e-14);
            let expected = x * x * (3.0 - 2.0 * x);
            assert!((reg_inc_beta(2.0, 2.0, x) - expected).abs() < 1e-14);
        }
        // Reflection identity.
        for &x in &[0.05, 0.2, 0.44, 0.81] {
            let lhs = reg_inc_beta(2.5, 0.5, x);
            let rhs = 1.0 - reg_inc_beta(0.5, 2.5, 1.0 - x);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn student_t_cdf_low_dof_closed_forms() {
        // nu = 1 (Cauchy): F(t) = 1/2 + atan(t)/pi.
        for &t in &[-5.0f64, -1.0, -0.2, 0.0, 0.3, 2.0, 10.0] {
            let expected = 0.5 + t.atan() / core::f64::consts::PI;
            assert!(
                (student_t_cdf(1.0, t) - expected).abs() < 1e-14,
                "cauchy mismatch at t = {t}"
            );
        }
        // nu = 2: F(t) = 1/2 + t / (2 sqrt(t^2 + 2)).
        for &t in &[-3.0f64, -0.5, 0.0, 0.5, 1.5, 4.0] {
            let expected = 0.5 + t / (2.0 * (t * t + 2.0).sqrt());
            assert!(
                (student_t_cdf(2.0, t) - expected).abs() < 1e-14,
                "nu=2 mismatch at t = {t}"
            );
        }
    }

    #[test]
    fn student_t_critical_values() {
        // One-sided critical values from the standard t table.
        let cases = [
            (1.0, 0.975, 12.70620474),
            (2.0, 0.975, 4.30265273),
            (5.0, 0.95, 2.01504837),
            (5.0, 0.975, 2.57058184),
            (10.0, 0.99, 2.76376946),
            (30.0, 0.975, 2.04227246),
        ];
        for (nu, p, t) in cases {
            let q = student_t_quantile(nu, p);
            assert!(
                ((q - t) / t).abs() < 1e-7,
                "quantile(nu={nu}, p={p}) = {q} != {t}"
            );
        }
    }

    #[test]
    fn student_t_quantile_round_trip() {
        for &nu in &[1.0, 2.0, 3.0, 5.0, 12.0] {
            for &p in &[1e-10, 1e-4, 0.02, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-12] {
                let t = student_t_quantile(nu, p);
                let back = student_t_cdf(nu, t);
                assert!(
                    (back - p).abs() < 1e-13 * (1.0 + p.abs()) + 1e-15,
                    "round trip failed at nu = {nu}, p = {p}: {back}"
                );
            }
        }
    }

    #[test]
    fn student_t_pdf_matches_cdf_slope() {
        // Central difference of the CDF reproduces the density.
        let h = 1e-6;
        for &nu in &[2.0, 5.0, 9.0] {
            for &t in &[-2.0, -0.4, 0.0, 0.9, 3.0] {
                let slope = (student_t_cdf(nu, t + h) - student_t_cdf(nu, t - h)) / (2.0 * h);
                assert!(
                    (slope - student_t_pdf(nu, t)).abs() < 1e-9,
                    "pdf mismatch at nu = {nu}, t = {t}"
                );
            }
        }
    }
}
