use egs_core::estimator::{egs_hat, es_hat, var_hat};
use serde::{Deserialize, Serialize};

use crate::compute::LambdaRule;
use crate::errors::CliResult;
use crate::ingest::Ingested;

/// The machine half of the report: full-precision values in a fixed
/// schema. Serialization order is struct order, so output is byte-stable.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RiskReport {
    pub meta: ReportMeta,
    pub grid: Vec<ReportRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportMeta {
    pub n: usize,
    pub source: String,
    pub lambda_rule: String,
    pub seed: Option<u64>,
    pub sign_convention: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub p: f64,
    pub var: f64,
    pub es: f64,
    pub cells: Vec<ReportCell>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportCell {
    pub r: f64,
    pub lambda: f64,
    pub egs: f64,
    pub coherent: bool,
}

/// Computes the full grid: VaR and ES per level, and the loaded shortfall
/// per `(p, r)` cell with the loading re-resolved from the rule at every
/// cell.
///
/// Returns the report plus warning lines (soft checks only; nothing here
/// fails the run).
pub fn build_report(
    ingested: &Ingested,
    p_grid: &[f64],
    r_grid: &[f64],
    rule: &LambdaRule,
    seed: Option<u64>,
) -> CliResult<(RiskReport, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut grid = Vec::with_capacity(p_grid.len());

    for &p in p_grid {
        let var = var_hat(&ingested.sample, p)?;
        let es = es_hat(&ingested.sample, p)?;
        let mut cells = Vec::with_capacity(r_grid.len());

        for &r in r_grid {
            let params = rule.resolve(p, r)?;
            let egs = egs_hat(&ingested.sample, &params);
            if !params.is_coherent() {
                warnings.push(format!(
                    "cell (p={p}, r={r}): loading {} exceeds the coherence bound {}",
                    params.lambda(),
                    params.lambda_max(),
                ));
            }
            cells.push(ReportCell {
                r,
                lambda: params.lambda(),
                egs,
                coherent: params.is_coherent(),
            });
        }

        // The shortfall dominates the tail average whenever the loading is
        // non-negative; a failure here would be a defect, not a data issue.
        for cell in &cells {
            if cell.egs < es - 1e-9 * es.abs().max(1.0) {
                warnings.push(format!(
                    "cell (p={p}, r={}): EGS {} fell below ES {}",
                    cell.r, cell.egs, es,
                ));
            }
        }

        // Qualitative pattern under the fraction rule: the shortfall eases
        // off as risk aversion grows. Soft check only.
        if rule.is_fraction() {
            for pair in cells.windows(2) {
                let tol = 1e-9 * pair[0].egs.abs().max(1.0);
                if pair[1].egs > pair[0].egs + tol {
                    warnings.push(format!(
                        "row p={p}: EGS increases from r={} to r={} ({} -> {}); \
                         expected non-increasing in r under a fixed fraction",
                        pair[0].r, pair[1].r, pair[0].egs, pair[1].egs,
                    ));
                }
            }
        }

        grid.push(ReportRow { p, var, es, cells });
    }

    let report = RiskReport {
        meta: ReportMeta {
            n: ingested.n,
            source: ingested.source.clone(),
            lambda_rule: rule.describe(),
            seed,
            sign_convention: ingested.sign_convention.to_string(),
        },
        grid,
    };
    Ok((report, warnings))
}

const LABEL_WIDTH: usize = 14;
const CELL_WIDTH: usize = 12;

fn percent(value: f64) -> String {
    format!("{:.2}%", value * 100.0)
}

/// Renders the human table: one block per level with VaR and ES labels on
/// the left and the shortfall cells across the risk-aversion columns,
/// echoing the presentation of the classic report grid. Values print as
/// percent with two decimals; the loadings print in scientific notation
/// (they grow without bound in `r`).
pub fn render_table(report: &RiskReport, mean: f64) -> String {
    let mut out = String::new();
    let meta = &report.meta;
    out.push_str("extended Gini shortfall report\n");
    out.push_str(&format!(
        "source: {}   n: {}   sign: {}\n",
        meta.source, meta.n, meta.sign_convention
    ));
    out.push_str(&format!(
        "rule: {}   mean loss: {:.6e}\n",
        meta.lambda_rule, mean
    ));
    out.push('\n');

    let mut header = format!("{:<LABEL_WIDTH$}", "EGS");
    if let Some(first) = report.grid.first() {
        for cell in &first.cells {
            header.push_str(&format!("{:>CELL_WIDTH$}", format!("r={}", cell.r)));
        }
    }
    out.push_str(header.trim_end());
    out.push('\n');

    for row in &report.grid {
        out.push_str(&format!("p={}\n", percent(row.p)));
        out.push_str(&format!("  VaR={}\n", percent(row.var)));
        out.push_str(&format!("  ES={}\n", percent(row.es)));

        let mut egs_line = format!("{:<LABEL_WIDTH$}", "  EGS");
        for cell in &row.cells {
            let mark = if cell.coherent { "" } else { "!" };
            egs_line.push_str(&format!(
                "{:>CELL_WIDTH$}",
                format!("{}{}", percent(cell.egs), mark)
            ));
        }
        out.push_str(egs_line.trim_end());
        out.push('\n');

        let mut lambda_line = format!("{:<LABEL_WIDTH$}", "  lambda");
        for cell in &row.cells {
            lambda_line.push_str(&format!("{:>CELL_WIDTH$}", format!("{:.4e}", cell.lambda)));
        }
        out.push_str(lambda_line.trim_end());
        out.push('\n');
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use egs_core::estimator::EmpiricalSample;

    fn synthetic() -> Ingested {
        let losses: Vec<f64> = (0..41).map(|i| (i as f64 - 20.0) * 0.0025).collect();
        let sample = EmpiricalSample::from_losses(&losses).unwrap();
        let n = sample.len();
        Ingested {
            sample,
            source: "synthetic.csv".into(),
            n,
            mean: 0.0,
            std_error: 0.001,
            drift_flagged: false,
            sign_convention: "losses-positive (loss = -return)",
        }
    }

    #[test]
    fn grid_shape_and_per_cell_midpoint_loading() {
        let ingested = synthetic();
        let rule = LambdaRule::Fraction(0.5);
        let (report, warnings) =
            build_report(&ingested, &[0.8, 0.9], &[2.0, 3.0], &rule, Some(11)).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        assert_eq!(report.meta.n, 41);
        assert_eq!(report.meta.seed, Some(11));
        assert_eq!(report.grid.len(), 2);
        for row in &report.grid {
            assert_eq!(row.cells.len(), 2);
            for cell in &row.cells {
                let params = rule.resolve(row.p, cell.r).unwrap();
                assert_eq!(cell.lambda, params.lambda());
                assert!(cell.coherent);
                assert!(cell.egs >= row.es - 1e-12);
            }
        }
    }

    #[test]
    fn table_lines_carry_no_trailing_whitespace() {
        let ingested = synthetic();
        let rule = LambdaRule::Fraction(0.5);
        let (report, _) =
            build_report(&ingested, &[0.9, 0.95], &[2.0, 6.0], &rule, None).unwrap();
        let table = render_table(&report, ingested.mean);
        assert!(table.contains("extended Gini shortfall report"));
        assert!(table.contains("p=95.00%"));
        for line in table.lines() {
            assert_eq!(line, line.trim_end(), "trailing whitespace in {line:?}");
        }
    }
}
