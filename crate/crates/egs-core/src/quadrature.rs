//! Adaptive Gauss–Kronrod quadrature.
//!
//! The kernel is the classic 7–15 pair: a 7-point Gauss rule embedded in a
//! 15-point Kronrod extension, with the QUADPACK error rescaling. The
//! adaptive driver repeatedly bisects the interval with the largest error
//! estimate until the combined bound meets the target.
//!
//! Termination demands the requested absolute accuracy *and* either relative
//! accuracy or the roundoff floor of the rule. The extra relative condition
//! matters here: tail-variability integrands can be many orders of magnitude
//! smaller than the tolerance a caller would choose for unit-scale values,
//! and a purely absolute test would accept them at almost no relative
//! accuracy. The roundoff floor keeps integrals that genuinely cancel to
//! zero from burning the budget chasing unattainable relative accuracy.

use crate::error::QuadError;
use crate::fp;
use alloc::vec::Vec;

/// Positive Kronrod abscissae for the 7–15 pair (the eighth node is the
/// interval center).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Weights of the embedded 7-point Gauss rule (odd Kronrod nodes; the last
/// entry is the center weight).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Accuracy targets and resource limits for the adaptive driver.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    /// Absolute error target; always enforced.
    pub abs_tol: f64,
    /// Relative error target, enforced unless the integral sits at the
    /// roundoff floor of the rule.
    pub rel_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    /// Same targets with a different absolute tolerance.
    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        QuadOptions { abs_tol, ..self }
    }
}

/// A converged integral with its error bound and the interval count used.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error_bound: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy, Debug)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    resabs: f64,
    /// Set once the interval is too narrow to bisect further.
    frozen: bool,
}

/// One 7–15 Gauss–Kronrod evaluation over `[a, b]`.
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Interval, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let half_abs = fp::abs(half);

    let eval = |x: f64| -> Result<f64, QuadError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };

    let fc = eval(center)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = fp::abs(resk);
    let mut fv = [0.0_f64; 14];

    for j in 0..7 {
        let absc = half * XGK[j];
        let f1 = eval(center - absc)?;
        let f2 = eval(center + absc)?;
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        let fsum = f1 + f2;
        if j % 2 == 1 {
            // Odd Kronrod nodes carry the embedded Gauss rule.
            resg += WG[j / 2] * fsum;
        }
        resk += WGK[j] * fsum;
        resabs += WGK[j] * (fp::abs(f1) + fp::abs(f2));
    }

    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * fp::abs(fc - reskh);
    for j in 0..7 {
        resasc += WGK[j] * (fp::abs(fv[2 * j] - reskh) + fp::abs(fv[2 * j + 1] - reskh));
    }

    let value = resk * half;
    resabs *= half_abs;
    resasc *= half_abs;
    let mut err = fp::abs((resk - resg) * half);
    if resasc != 0.0 && err != 0.0 {
        err = resasc * f64::min(1.0, fp::powf(200.0 * err / resasc, 1.5));
    }
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }

    Ok(Interval {
        a,
        b,
        value,
        err,
        resabs,
        frozen: false,
    })
}

/// Adaptively integrates `f` over `[a, b]`.
///
/// The result's `error_bound` satisfies `error_bound <= abs_tol`, and unless
/// the integral sits at the rule's roundoff floor it also satisfies
/// `error_bound <= rel_tol * |value|`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    debug_assert!(opts.abs_tol > 0.0, "absolute tolerance must be positive");
    debug_assert!(a <= b, "integration bounds must be ordered");
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_bound: 0.0,
            intervals: 0,
        });
    }

    let mut intervals: Vec<Interval> = Vec::with_capacity(64);
    intervals.push(qk15(&f, a, b)?);

    loop {
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut total_resabs = 0.0;
        for iv in &intervals {
            total += iv.value;
            total_err += iv.err;
            total_resabs += iv.resabs;
        }

        let floor = 100.0 * f64::EPSILON * total_resabs;
        let rel_ok = total_err <= opts.rel_tol * fp::abs(total) || total_err <= floor;
        if total_err <= opts.abs_tol && rel_ok {
            return Ok(QuadResult {
                value: total,
                error_bound: total_err,
                intervals: intervals.len(),
            });
        }

        if intervals.len() >= opts.max_intervals {
            return Err(QuadError::NotConverged {
                estimate: total,
                error_bound: total_err,
            });
        }

        // Bisect the splittable interval with the largest error estimate.
        let mut worst: Option<usize> = None;
        for (i, iv) in intervals.iter().enumerate() {
            if iv.frozen {
                continue;
            }
            match worst {
                Some(w) if intervals[w].err >= iv.err => {}
                _ => worst = Some(i),
            }
        }
        let Some(w) = worst else {
            // Nothing left to refine; report what we have.
            return if total_err <= opts.abs_tol {
                Ok(QuadResult {
                    value: total,
                    error_bound: total_err,
                    intervals: intervals.len(),
                })
            } else {
                Err(QuadError::NotConverged {
                    estimate: total,
                    error_bound: total_err,
                })
            };
        };

        let (wa, wb) = (intervals[w].a, intervals[w].b);
        let mid = 0.5 * (wa + wb);
        if !(mid > wa && mid < wb) {
            intervals[w].frozen = true;
            continue;
        }
        let left = qk15(&f, wa, mid)?;
        let right = qk15(&f, mid, wb)?;
        intervals[w] = left;
        intervals.push(right);
    }
}
