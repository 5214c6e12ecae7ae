use egs_core::analytic::{
    es_normal, es_student_t, es_uniform, teg_normal, teg_student_t, teg_uniform, StdNormal,
    StudentT,
};
use egs_core::estimator::{
    egini_hat, egs_hat, es_hat, gini_hat, teg_hat, var_hat, EmpiricalSample,
};
use egs_core::special::{normal_quantile, student_t_quantile};
use egs_core::{family, MeasureId, Method, ParamSet};

use crate::cli::LambdaArgs;
use crate::errors::{CliError, CliResult};

/// How the loading is chosen: an absolute value, or a fraction of the
/// coherence bound `lambda_max(r, p)` resolved per `(r, p)` cell.
#[derive(Clone, Copy, Debug)]
pub enum LambdaRule {
    Absolute(f64),
    Fraction(f64),
}

impl LambdaRule {
    /// Folds the flag pair down to a rule; neither flag means the midpoint
    /// of the coherent range, `lambda = lambda_max / 2`.
    pub fn from_args(args: &LambdaArgs) -> Self {
        match (args.lambda, args.lambda_frac) {
            (Some(value), _) => LambdaRule::Absolute(value),
            (None, Some(fraction)) => LambdaRule::Fraction(fraction),
            (None, None) => LambdaRule::Fraction(0.5),
        }
    }

    /// Resolves the loading at a grid cell.
    pub fn resolve(&self, p: f64, r: f64) -> CliResult<ParamSet> {
        let params = match self {
            LambdaRule::Absolute(value) => ParamSet::new(p, r, *value),
            LambdaRule::Fraction(fraction) => ParamSet::with_lambda_fraction(p, r, *fraction),
        };
        params.map_err(CliError::from)
    }

    /// Whether the rule fixes the fraction of the bound (the loading then
    /// re-resolves per cell).
    pub fn is_fraction(&self) -> bool {
        matches!(self, LambdaRule::Fraction(_))
    }

    /// Stable human description, also embedded in the JSON metadata.
    pub fn describe(&self) -> String {
        match self {
            LambdaRule::Absolute(value) => format!("absolute lambda = {value}"),
            LambdaRule::Fraction(fraction) => {
                format!("lambda = {fraction} * lambda_max(r, p) per cell")
            }
        }
    }
}

/// The reference models the `compute` subcommand can evaluate without a
/// sample file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Dist {
    /// Standard normal.
    Normal,
    /// Symmetric uniform on [-1, 1].
    Uniform,
    /// Uniform on [0, 1].
    Uniform01,
    /// Student-t with `--dof` degrees of freedom.
    StudentT,
}

/// Command-line name for each measure, mapped onto [`MeasureId`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MeasureArg {
    Var,
    Es,
    Gini,
    Egini,
    Teg,
    Egs,
}

impl MeasureArg {
    pub fn id(self) -> MeasureId {
        match self {
            MeasureArg::Var => MeasureId::Var,
            MeasureArg::Es => MeasureId::Es,
            MeasureArg::Gini => MeasureId::Gini,
            MeasureArg::Egini => MeasureId::EGini,
            MeasureArg::Teg => MeasureId::Teg,
            MeasureArg::Egs => MeasureId::Egs,
        }
    }

    pub fn needs_p(self) -> bool {
        matches!(
            self,
            MeasureArg::Var | MeasureArg::Es | MeasureArg::Teg | MeasureArg::Egs
        )
    }

    pub fn needs_r(self) -> bool {
        matches!(self, MeasureArg::Egini | MeasureArg::Teg | MeasureArg::Egs)
    }
}

/// A computed value plus how it was obtained. The loading fields are only
/// populated for the shortfall.
#[derive(Clone, Copy, Debug)]
pub struct Computed {
    pub value: f64,
    pub method: Method,
    pub lambda: Option<f64>,
    pub coherent: Option<bool>,
}

impl Computed {
    fn plain(value: f64, method: Method) -> Self {
        Computed {
            value,
            method,
            lambda: None,
            coherent: None,
        }
    }

    fn loaded(value: f64, method: Method, params: &ParamSet) -> Self {
        Computed {
            value,
            method,
            lambda: Some(params.lambda()),
            coherent: Some(params.is_coherent()),
        }
    }
}

/// Gini mean difference of the standard normal, `2 / sqrt(pi)`.
const GINI_NORMAL: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Extended Gini of the uniform on [0, 1]: `(r - 1) / (r + 1)`.
fn egini_uniform01(r: f64) -> f64 {
    (r - 1.0) / (r + 1.0)
}

/// Evaluates one measure on a reference model, preferring closed forms and
/// falling back to quadrature where none exists.
pub fn compute_dist(
    dist: Dist,
    dof: Option<f64>,
    measure: MeasureArg,
    p: Option<f64>,
    r: Option<f64>,
    rule: &LambdaRule,
    tol: f64,
) -> CliResult<Computed> {
    let p_req = || p.ok_or_else(|| CliError::usage("--p is required for this measure"));
    let r_req = || r.ok_or_else(|| CliError::usage("--r is required for this measure"));

    match dist {
        Dist::Normal => match measure {
            MeasureArg::Var => Ok(Computed::plain(normal_quantile(p_req()?), Method::Analytic)),
            MeasureArg::Es => Ok(Computed::plain(es_normal(p_req()?)?, Method::Analytic)),
            MeasureArg::Gini => Ok(Computed::plain(GINI_NORMAL, Method::Analytic)),
            MeasureArg::Egini => {
                let r = r_req()?;
                if r == 2.0 {
                    Ok(Computed::plain(GINI_NORMAL, Method::Analytic))
                } else {
                    let value = family::egini(&StdNormal, r, tol)?;
                    Ok(Computed::plain(value, Method::Quadrature))
                }
            }
            MeasureArg::Teg => Ok(Computed::plain(
                teg_normal(r_req()?, p_req()?, tol)?,
                Method::Analytic,
            )),
            MeasureArg::Egs => {
                let params = rule.resolve(p_req()?, r_req()?)?;
                let es = es_normal(params.p())?;
                let teg = teg_normal(params.r(), params.p(), tol)?;
                Ok(Computed::loaded(
                    es + params.lambda() * teg,
                    Method::Analytic,
                    &params,
                ))
            }
        },
        Dist::Uniform => match measure {
            MeasureArg::Var => Ok(Computed::plain(2.0 * p_req()? - 1.0, Method::Analytic)),
            MeasureArg::Es => Ok(Computed::plain(es_uniform(p_req()?)?, Method::Analytic)),
            MeasureArg::Gini => Ok(Computed::plain(
                2.0 * egini_uniform01(2.0),
                Method::Analytic,
            )),
            MeasureArg::Egini => Ok(Computed::plain(
                2.0 * egini_uniform01(r_req()?),
                Method::Analytic,
            )),
            MeasureArg::Teg => Ok(Computed::plain(
                teg_uniform(r_req()?, p_req()?)?,
                Method::Analytic,
            )),
            MeasureArg::Egs => {
                let params = rule.resolve(p_req()?, r_req()?)?;
                let es = es_uniform(params.p())?;
                let teg = teg_uniform(params.r(), params.p())?;
                Ok(Computed::loaded(
                    es + params.lambda() * teg,
                    Method::Analytic,
                    &params,
                ))
            }
        },
        // The unit uniform is 0.5 + 0.5 Z for the symmetric uniform Z:
        // monetary values shift and scale, variability only scales.
        Dist::Uniform01 => match measure {
            MeasureArg::Var => Ok(Computed::plain(p_req()?, Method::Analytic)),
            MeasureArg::Es => Ok(Computed::plain(
                0.5 + 0.5 * es_uniform(p_req()?)?,
                Method::Analytic,
            )),
            MeasureArg::Gini => Ok(Computed::plain(egini_uniform01(2.0), Method::Analytic)),
            MeasureArg::Egini => Ok(Computed::plain(
                egini_uniform01(r_req()?),
                Method::Analytic,
            )),
            MeasureArg::Teg => Ok(Computed::plain(
                0.5 * teg_uniform(r_req()?, p_req()?)?,
                Method::Analytic,
            )),
            MeasureArg::Egs => {
                let params = rule.resolve(p_req()?, r_req()?)?;
                let es = 0.5 + 0.5 * es_uniform(params.p())?;
                let teg = 0.5 * teg_uniform(params.r(), params.p())?;
                Ok(Computed::loaded(
                    es + params.lambda() * teg,
                    Method::Analytic,
                    &params,
                ))
            }
        },
        Dist::StudentT => {
            let dof =
                dof.ok_or_else(|| CliError::usage("--dof is required with --dist student-t"))?;
            let theta = (dof + 1.0) / 2.0;
            match measure {
                MeasureArg::Var => Ok(Computed::plain(
                    student_t_quantile(dof, p_req()?),
                    Method::Analytic,
                )),
                MeasureArg::Es => Ok(Computed::plain(
                    es_student_t(theta, p_req()?)?,
                    Method::Analytic,
                )),
                MeasureArg::Gini => {
                    let spec = StudentT::from_dof(dof)?;
                    let value = family::gini(&spec, tol)?;
                    Ok(Computed::plain(value, Method::Quadrature))
                }
                MeasureArg::Egini => {
                    let spec = StudentT::from_dof(dof)?;
                    let value = family::egini(&spec, r_req()?, tol)?;
                    Ok(Computed::plain(value, Method::Quadrature))
                }
                MeasureArg::Teg => Ok(Computed::plain(
                    teg_student_t(theta, r_req()?, p_req()?, tol)?,
                    Method::Analytic,
                )),
                MeasureArg::Egs => {
                    let params = rule.resolve(p_req()?, r_req()?)?;
                    let es = es_student_t(theta, params.p())?;
                    let teg = teg_student_t(theta, params.r(), params.p(), tol)?;
                    Ok(Computed::loaded(
                        es + params.lambda() * teg,
                        Method::Analytic,
                        &params,
                    ))
                }
            }
        }
    }
}

/// Evaluates one measure on an ingested sample with the order-statistic
/// estimators.
pub fn compute_sample(
    sample: &EmpiricalSample,
    measure: MeasureArg,
    p: Option<f64>,
    r: Option<f64>,
    rule: &LambdaRule,
) -> CliResult<Computed> {
    let p_req = || p.ok_or_else(|| CliError::usage("--p is required for this measure"));
    let r_req = || r.ok_or_else(|| CliError::usage("--r is required for this measure"));

    match measure {
        MeasureArg::Var => Ok(Computed::plain(
            var_hat(sample, p_req()?)?,
            Method::Empirical,
        )),
        MeasureArg::Es => Ok(Computed::plain(
            es_hat(sample, p_req()?)?,
            Method::Empirical,
        )),
        MeasureArg::Gini => Ok(Computed::plain(gini_hat(sample), Method::Empirical)),
        MeasureArg::Egini => Ok(Computed::plain(
            egini_hat(sample, r_req()?)?,
            Method::Empirical,
        )),
        MeasureArg::Teg => Ok(Computed::plain(
            teg_hat(sample, r_req()?, p_req()?)?,
            Method::Empirical,
        )),
        MeasureArg::Egs => {
            let params = rule.resolve(p_req()?, r_req()?)?;
            Ok(Computed::loaded(
                egs_hat(sample, &params),
                Method::Empirical,
                &params,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        let scale = a.abs().max(b.abs()).max(1.0);
        assert!((a - b).abs() <= tol * scale, "{a} vs {b}");
    }

    fn rule_of(lambda: Option<f64>, lambda_frac: Option<f64>) -> LambdaRule {
        LambdaRule::from_args(&LambdaArgs {
            lambda,
            lambda_frac,
        })
    }

    #[test]
    fn loading_rule_defaults_to_the_midpoint() {
        let rule = rule_of(None, None);
        assert!(rule.is_fraction());
        let params = rule.resolve(0.9, 2.0).unwrap();
        close(params.lambda(), 0.5 * params.lambda_max(), 1e-15);

        let absolute = rule_of(Some(0.25), None);
        assert!(!absolute.is_fraction());
        assert_eq!(absolute.resolve(0.9, 2.0).unwrap().lambda(), 0.25);
        assert_eq!(absolute.describe(), "absolute lambda = 0.25");
        assert_eq!(
            rule_of(None, Some(0.5)).describe(),
            "lambda = 0.5 * lambda_max(r, p) per cell"
        );
    }

    #[test]
    fn unit_uniform_is_an_affine_image_of_the_symmetric_uniform() {
        let rule = rule_of(None, None);
        let value = |dist, measure, p: Option<f64>, r: Option<f64>| {
            compute_dist(dist, None, measure, p, r, &rule, 1e-10)
                .unwrap()
                .value
        };

        assert_eq!(value(Dist::Uniform01, MeasureArg::Var, Some(0.9), None), 0.9);
        close(
            value(Dist::Uniform01, MeasureArg::Es, Some(0.9), None),
            0.5 + 0.5 * value(Dist::Uniform, MeasureArg::Es, Some(0.9), None),
            1e-15,
        );
        close(
            value(Dist::Uniform01, MeasureArg::Gini, None, None),
            1.0 / 3.0,
            1e-15,
        );
        // Variability only scales: half the symmetric uniform's value.
        close(
            value(Dist::Uniform01, MeasureArg::Teg, Some(0.8), Some(3.0)),
            0.5 * value(Dist::Uniform, MeasureArg::Teg, Some(0.8), Some(3.0)),
            1e-15,
        );
    }

    #[test]
    fn zero_loading_collapses_the_shortfall_to_es_on_samples() {
        let sample = EmpiricalSample::from_losses(&[0.3, -0.1, 0.7, 0.2, -0.4]).unwrap();
        let es = compute_sample(&sample, MeasureArg::Es, Some(0.6), None, &rule_of(None, None))
            .unwrap();
        let egs = compute_sample(
            &sample,
            MeasureArg::Egs,
            Some(0.6),
            Some(3.0),
            &rule_of(None, Some(0.0)),
        )
        .unwrap();
        assert_eq!(egs.value, es.value);
        assert_eq!(egs.lambda, Some(0.0));
        assert_eq!(egs.coherent, Some(true));
    }
}
