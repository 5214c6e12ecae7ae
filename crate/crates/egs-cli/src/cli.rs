use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use egs_core::{MeasureId, Method};

use crate::compute::{compute_dist, compute_sample, Computed, Dist, LambdaRule, MeasureArg};
use crate::errors::{CliError, CliResult};
use crate::ingest::{ingest, IngestConfig, Ingested, Units};
use crate::report::{build_report, render_table};
use crate::sense::{default_levels, render_sense, run_sense};
use crate::verify_cmd::{failure, render_verify, run_verify, VerifyConfig};

/// Risk and variability measures of the extended Gini family: single
/// values, report grids, axiom verification, and weight sensitivities.
#[derive(Debug, Parser)]
#[command(name = "egs", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a single measure on a sample file or a reference model
    Compute(ComputeArgs),
    /// Compute the full (p, r) report grid from a sample file
    Report(ReportArgs),
    /// Check the coherence axioms at a loading, or hunt a counterexample
    /// beyond the bound
    Verify(VerifyArgs),
    /// Report the spectral weight's parameter sensitivities
    Sensitivity(SensitivityArgs),
}

/// The loading flags: an absolute value or a fraction of the coherence
/// bound. Omitting both selects the midpoint, `lambda_max / 2`.
#[derive(Debug, Clone, Copy, Args)]
pub struct LambdaArgs {
    /// Absolute loading on the tail-variability term
    #[arg(long, conflicts_with = "lambda_frac")]
    pub lambda: Option<f64>,
    /// Loading as a fraction of the coherence bound lambda_max(r, p)
    #[arg(long)]
    pub lambda_frac: Option<f64>,
}

/// Flags shared by every subcommand that reads a sample file.
#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Column name (requires --header) or zero-based index of the series
    #[arg(long, default_value = "0")]
    pub column: String,
    /// The first non-comment row is a header
    #[arg(long)]
    pub header: bool,
    /// Scale of the input numbers
    #[arg(long, value_enum, default_value_t = Units::Decimal)]
    pub units: Units,
    /// The input already holds losses; skip the return -> loss negation
    #[arg(long)]
    pub no_negate: bool,
}

impl IngestArgs {
    fn config(&self, path: &Path) -> IngestConfig {
        IngestConfig {
            path: path.to_path_buf(),
            column: self.column.clone(),
            units: self.units,
            negate_returns: !self.no_negate,
            header: self.header,
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Measure to evaluate
    #[arg(long, value_enum)]
    pub measure: MeasureArg,
    /// CSV file with a return (or loss) series
    #[arg(long, conflicts_with = "dist")]
    pub input: Option<PathBuf>,
    /// Reference model to evaluate instead of a sample
    #[arg(long, value_enum)]
    pub dist: Option<Dist>,
    /// Degrees of freedom for --dist student-t
    #[arg(long)]
    pub dof: Option<f64>,
    /// Probability level in (0, 1)
    #[arg(long)]
    pub p: Option<f64>,
    /// Risk-aversion parameter, r > 1
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub loading: LambdaArgs,
    /// Quadrature tolerance for values without a closed form
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Emit machine JSON instead of the human line
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// CSV file with a return (or loss) series
    #[arg(long)]
    pub input: PathBuf,
    /// Probability levels for the rows
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.9, 0.95, 0.99])]
    pub p: Vec<f64>,
    /// Risk-aversion parameters for the columns
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 3.0, 6.0, 20.0, 30.0])]
    pub r: Vec<f64>,
    #[command(flatten)]
    pub loading: LambdaArgs,
    /// Seed echoed into the report metadata
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Emit machine JSON instead of the human table
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Probability level in (0, 1)
    #[arg(long)]
    pub p: f64,
    /// Risk-aversion parameter, r > 1
    #[arg(long)]
    pub r: f64,
    #[command(flatten)]
    pub loading: LambdaArgs,
    /// Randomized trials per axiom
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Sample size per trial
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Trial budget for the counterexample search beyond the bound
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// Seed for the trial streams
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Violation tolerance relative to the comparison scale
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Emit machine JSON instead of the human summary
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    /// Probability level in (0, 1)
    #[arg(long)]
    pub p: f64,
    /// Risk-aversion parameter, r > 1
    #[arg(long)]
    pub r: f64,
    #[command(flatten)]
    pub loading: LambdaArgs,
    /// Quantile levels to evaluate at (default: five points inside the
    /// tail window)
    #[arg(long, value_delimiter = ',')]
    pub u: Vec<f64>,
    /// Emit machine JSON instead of the human table
    #[arg(long)]
    pub json: bool,
}

/// Writes the payload to stdout. A closed pipe (e.g. `egs ... | head`) is
/// a clean early exit, not a panic.
fn write_stdout(text: &str) -> CliResult<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CliError::data(format!("cannot write to stdout: {e}"))),
    }
}

fn emit_json<T: Serialize>(value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::data(format!("cannot serialize result: {e}")))?;
    text.push('\n');
    write_stdout(&text)
}

fn emit_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

/// Machine shape of a `compute` result. Inapplicable fields are omitted.
#[derive(Serialize)]
struct SingleResult<'a> {
    measure: MeasureId,
    value: f64,
    method: Method,
    source: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coherent: Option<bool>,
}

fn measure_name(measure: MeasureArg) -> &'static str {
    match measure {
        MeasureArg::Var => "var",
        MeasureArg::Es => "es",
        MeasureArg::Gini => "gini",
        MeasureArg::Egini => "egini",
        MeasureArg::Teg => "teg",
        MeasureArg::Egs => "egs",
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Analytic => "analytic",
        Method::Quadrature => "quadrature",
        Method::Empirical => "empirical",
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compute(args) => run_compute(args),
        Command::Report(args) => run_report(args),
        Command::Verify(args) => run_verify_cmd(args),
        Command::Sensitivity(args) => run_sensitivity(args),
    }
}

fn run_compute(args: ComputeArgs) -> CliResult<()> {
    if args.measure.needs_p() && args.p.is_none() {
        return Err(CliError::usage(format!(
            "--p is required for --measure {}",
            measure_name(args.measure)
        )));
    }
    if args.measure.needs_r() && args.r.is_none() {
        return Err(CliError::usage(format!(
            "--r is required for --measure {}",
            measure_name(args.measure)
        )));
    }
    let rule = LambdaRule::from_args(&args.loading);

    let (computed, source, n, ingested): (Computed, String, Option<usize>, Option<Ingested>) =
        match (&args.input, args.dist) {
            (Some(path), None) => {
                let ingested = ingest(&args.ingest.config(path))?;
                emit_warnings(&ingested.warnings());
                let computed =
                    compute_sample(&ingested.sample, args.measure, args.p, args.r, &rule)?;
                let source = ingested.source.clone();
                let n = ingested.n;
                (computed, source, Some(n), Some(ingested))
            }
            (None, Some(dist)) => {
                let computed = compute_dist(
                    dist, args.dof, args.measure, args.p, args.r, &rule, args.tol,
                )?;
                let source = match dist {
                    Dist::Normal => "normal",
                    Dist::Uniform => "uniform",
                    Dist::Uniform01 => "uniform01",
                    Dist::StudentT => "student-t",
                };
                (computed, source.to_string(), None, None)
            }
            (None, None) => {
                return Err(CliError::usage(
                    "choose a source: --input <file> or --dist <model>",
                ));
            }
            (Some(_), Some(_)) => unreachable!("clap rejects --input with --dist"),
        };
    drop(ingested);

    if computed.coherent == Some(false) {
        eprintln!(
            "warning: loading {:.6e} exceeds the coherence bound; the value is \
             well defined but not subadditive",
            computed.lambda.unwrap_or(f64::NAN)
        );
    }

    if args.json {
        let result = SingleResult {
            measure: args.measure.id(),
            value: computed.value,
            method: computed.method,
            source: &source,
            n,
            p: args.measure.needs_p().then(|| args.p.unwrap()),
            r: args.measure.needs_r().then(|| args.r.unwrap()),
            lambda: computed.lambda,
            coherent: computed.coherent,
        };
        emit_json(&result)
    } else {
        let mut line = format!(
            "{} = {} ({}; {}",
            measure_name(args.measure),
            computed.value,
            method_name(computed.method),
            source,
        );
        if let Some(n) = n {
            line.push_str(&format!(", n={n}"));
        }
        line.push_str(")\n");
        write_stdout(&line)
    }
}

fn run_report(args: ReportArgs) -> CliResult<()> {
    if args.p.is_empty() || args.r.is_empty() {
        return Err(CliError::usage("the --p and --r grids must be nonempty"));
    }
    let rule = LambdaRule::from_args(&args.loading);
    let ingested = ingest(&args.ingest.config(&args.input))?;
    emit_warnings(&ingested.warnings());

    let (report, warnings) = build_report(&ingested, &args.p, &args.r, &rule, args.seed)?;
    emit_warnings(&warnings);

    if args.json {
        eprintln!(
            "note: sample mean {:.6e} (standard error {:.6e})",
            ingested.mean, ingested.std_error
        );
        emit_json(&report)
    } else {
        write_stdout(&render_table(&report, ingested.mean))
    }
}

fn run_verify_cmd(args: VerifyArgs) -> CliResult<()> {
    let rule = LambdaRule::from_args(&args.loading);
    let params = rule.resolve(args.p, args.r)?;
    let config = VerifyConfig {
        params,
        trials: args.trials,
        n: args.n,
        budget: args.budget,
        seed: args.seed,
        tol: args.tol,
    };
    let outcome = run_verify(&config);

    if args.json {
        emit_json(&outcome)?;
    } else {
        write_stdout(&render_verify(&outcome))?;
    }

    match failure(&outcome) {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn run_sensitivity(args: SensitivityArgs) -> CliResult<()> {
    let rule = LambdaRule::from_args(&args.loading);
    let params = rule.resolve(args.p, args.r)?;
    let levels = if args.u.is_empty() {
        default_levels(params.p())
    } else {
        args.u.clone()
    };
    let outcome = run_sense(&params, &levels)?;

    if args.json {
        emit_json(&outcome)
    } else {
        write_stdout(&render_sense(&outcome))
    }
}
