use egs_core::sensitivity::{sensitivity_report, SensitivityReport};
use egs_core::{ParamSet, SensError};
use serde::Serialize;

use crate::errors::{CliError, CliResult};

/// The sensitivity report for a parameter point, evaluated at a set of
/// quantile levels.
#[derive(Debug, Serialize)]
pub struct SenseOutcome {
    pub p: f64,
    pub r: f64,
    pub lambda: f64,
    pub points: Vec<SensitivityReport>,
}

/// Default evaluation levels: five points evenly spread through the
/// interior of the tail window `(p, 1)`.
pub fn default_levels(p: f64) -> Vec<f64> {
    (1..=5).map(|k| p + (1.0 - p) * k as f64 / 6.0).collect()
}

pub fn run_sense(params: &ParamSet, levels: &[f64]) -> CliResult<SenseOutcome> {
    let mut points = Vec::with_capacity(levels.len());
    for &u in levels {
        let report = sensitivity_report(params, u).map_err(|e| match e {
            SensError::AtKink { u } => CliError::usage(format!(
                "u = {u} sits exactly on the kink at p; the spectral weight is \
                 one-sided there — evaluate just inside the window instead"
            )),
            SensError::Param(p) => CliError::from(p),
        })?;
        points.push(report);
    }
    Ok(SenseOutcome {
        p: params.p(),
        r: params.r(),
        lambda: params.lambda(),
        points,
    })
}

/// Human rendering: the shared thresholds once, then one block per level.
pub fn render_sense(outcome: &SenseOutcome) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "spectral weight sensitivities at p={}, r={}, lambda={:.6e}\n",
        outcome.p, outcome.r, outcome.lambda
    ));

    if let Some(first) = outcome.points.first() {
        out.push_str(&format!(
            "lambda_max {:.6e}   d(lambda_max)/dp {:.6e}   d(lambda_max)/dr {:.6e}   \
             r_critical {:.6}\n",
            first.lambda_max, first.bound_dp, first.bound_dr, first.r_critical
        ));
        let threshold = match first.p_threshold {
            Some(t) => format!("{t:.6}"),
            None => "none".to_string(),
        };
        out.push_str(&format!(
            "loading-slope root u0 {:.6}   level-slope threshold {}   \
             order-flip level {:.6}\n",
            first.lambda_root, threshold, first.r_flip_level
        ));
        out.push('\n');
    }

    out.push_str(&format!(
        "{:>10}{:>14}{:>14}{:>14}{:>14}{:>14}{:>14}{:>14}\n",
        "u", "phi", "d/du", "d/dlambda", "d/dp", "d/dr", "d2/dudp", "d2/dudr"
    ));
    for point in &outcome.points {
        out.push_str(&format!(
            "{:>10.6}{:>14.4e}{:>14.4e}{:>14.4e}{:>14.4e}{:>14.4e}{:>14.4e}{:>14.4e}\n",
            point.u,
            point.phi,
            point.dphi_du,
            point.dphi_dlambda,
            point.dphi_dp,
            point.dphi_dr,
            point.d2phi_du_dp,
            point.d2phi_du_dr,
        ));
    }
    out
}
