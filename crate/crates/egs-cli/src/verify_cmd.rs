use egs_core::verifier::{
    find_subadditivity_violation, verify_axiom, Axiom, AxiomCase, VerifierResult,
};
use egs_core::ParamSet;
use serde::Serialize;

use crate::errors::CliError;

/// The axioms the suite exercises, in reporting order.
pub const SUITE: [Axiom; 7] = [
    Axiom::Monotonicity,
    Axiom::TranslationInvariance,
    Axiom::PositiveHomogeneity,
    Axiom::Subadditivity,
    Axiom::ComonotoneAdditivity,
    Axiom::DominatesTailAverage,
    Axiom::ConvexOrder,
];

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub params: ParamSet,
    /// Randomized trials per axiom (coherent loadings).
    pub trials: usize,
    /// Sample size per trial.
    pub n: usize,
    /// Trial budget for the counterexample search (loadings beyond the
    /// bound).
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Everything the subcommand learned, serializable as the JSON result.
#[derive(Debug, Serialize)]
pub struct VerifyOutcome {
    pub p: f64,
    pub r: f64,
    pub lambda: f64,
    pub lambda_max: f64,
    pub coherent: bool,
    /// Axiom batteries; empty when the loading is beyond the bound (the
    /// axioms are then expected to fail, so the search runs instead).
    pub axioms: Vec<VerifierResult>,
    /// The recorded counterexample for a loading beyond the bound.
    pub counterexample: Option<AxiomCase>,
    /// Trials the search consumed, when it ran.
    pub search_trials: Option<usize>,
    pub pass: bool,
}

/// Runs the suite appropriate to the loading.
///
/// Within the coherence bound every axiom must hold: any violation fails
/// the run. Beyond the bound subadditivity must be refutable: the search
/// must produce a concrete counterexample within its budget, and failing
/// to find one fails the run.
pub fn run_verify(config: &VerifyConfig) -> VerifyOutcome {
    let params = &config.params;
    let coherent = params.is_coherent();

    if coherent {
        let axioms: Vec<VerifierResult> = SUITE
            .iter()
            .map(|&axiom| {
                verify_axiom(
                    axiom,
                    params,
                    config.n,
                    config.trials,
                    config.seed,
                    config.tol,
                )
            })
            .collect();
        let pass = axioms.iter().all(|r| r.violation_count == 0);
        VerifyOutcome {
            p: params.p(),
            r: params.r(),
            lambda: params.lambda(),
            lambda_max: params.lambda_max(),
            coherent,
            axioms,
            counterexample: None,
            search_trials: None,
            pass,
        }
    } else {
        let search = find_subadditivity_violation(
            params,
            config.n,
            config.budget,
            config.seed,
            config.tol,
        );
        let pass = search.found.is_some();
        VerifyOutcome {
            p: params.p(),
            r: params.r(),
            lambda: params.lambda(),
            lambda_max: params.lambda_max(),
            coherent,
            axioms: Vec::new(),
            counterexample: search.found,
            search_trials: Some(search.trials),
            pass,
        }
    }
}

fn axiom_name(axiom: Axiom) -> &'static str {
    match axiom {
        Axiom::Monotonicity => "monotonicity",
        Axiom::TranslationInvariance => "translation-invariance",
        Axiom::PositiveHomogeneity => "positive-homogeneity",
        Axiom::Subadditivity => "subadditivity",
        Axiom::ComonotoneAdditivity => "comonotone-additivity",
        Axiom::DominatesTailAverage => "dominates-tail-average",
        Axiom::ConvexOrder => "convex-order",
    }
}

/// Human rendering of the outcome.
pub fn render_verify(outcome: &VerifyOutcome) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "loading {:.6e} against bound {:.6e} ({})\n",
        outcome.lambda,
        outcome.lambda_max,
        if outcome.coherent {
            "coherent"
        } else {
            "beyond the bound"
        }
    ));

    if outcome.coherent {
        for result in &outcome.axioms {
            out.push_str(&format!(
                "{:<24}{:>8} trials{:>6} violations   worst gap {:>12.4e}\n",
                axiom_name(result.axiom),
                result.trials,
                result.violation_count,
                result.worst_gap,
            ));
        }
    } else {
        match (&outcome.counterexample, outcome.search_trials) {
            (Some(case), Some(trials)) => {
                out.push_str(&format!(
                    "subadditivity counterexample after {} trial(s): \
                     rho(X+Y) = {:.6} > rho(X) + rho(Y) = {:.6} (gap {:.3e}, {} states)\n",
                    trials,
                    case.lhs,
                    case.rhs,
                    case.gap,
                    case.x.len(),
                ));
            }
            (None, Some(trials)) => {
                out.push_str(&format!(
                    "no subadditivity counterexample within {trials} trial(s)\n"
                ));
            }
            _ => {}
        }
    }

    out.push_str(&format!(
        "result: {}\n",
        if outcome.pass { "PASS" } else { "FAIL" }
    ));
    out
}

/// The exit-3 error when the outcome failed, if any.
pub fn failure(outcome: &VerifyOutcome) -> Option<CliError> {
    if outcome.pass {
        return None;
    }
    let msg = if outcome.coherent {
        let failed: Vec<&str> = outcome
            .axioms
            .iter()
            .filter(|r| r.violation_count > 0)
            .map(|r| axiom_name(r.axiom))
            .collect();
        format!(
            "verification failed: violations of {} at a coherent loading",
            failed.join(", ")
        )
    } else {
        "verification failed: no subadditivity counterexample found within budget \
         for a loading beyond the bound"
            .to_string()
    };
    Some(CliError::Verification(msg))
}
