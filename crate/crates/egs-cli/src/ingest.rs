use std::path::{Path, PathBuf};

use egs_core::estimator::EmpiricalSample;

use crate::errors::{CliError, CliResult};

/// How the numbers in the input column are scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    /// Plain decimal returns or losses (0.015 means 1.5%).
    Decimal,
    /// Percent figures; divided by 100 at ingestion ("1.5" becomes 0.015).
    Percent,
}

/// Everything needed to turn a CSV file into a loss sample.
#[derive(Clone, Debug)]
pub struct IngestConfig {
    pub path: PathBuf,
    /// Column name (requires a header) or zero-based column index.
    pub column: String,
    pub units: Units,
    /// The input holds returns (profit-positive); negate into losses.
    /// Default true — pass `--no-negate` when the input is already losses.
    pub negate_returns: bool,
    pub header: bool,
}

/// The parsed sample plus the summary statistics the reports print.
#[derive(Debug)]
pub struct Ingested {
    pub sample: EmpiricalSample,
    /// File name of the source, for report metadata.
    pub source: String,
    pub n: usize,
    /// Mean of the loss series (after unit conversion and negation).
    pub mean: f64,
    /// Standard error of the mean; infinite for a single observation.
    pub std_error: f64,
    /// Whether `|mean| > 2 * std_error` — a heuristic drift flag, not a
    /// stationarity test.
    pub drift_flagged: bool,
    /// Human description of the sign convention applied.
    pub sign_convention: &'static str,
}

impl Ingested {
    /// Warning lines for stderr; the drift note is heuristic by design.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.drift_flagged {
            out.push(format!(
                "sample mean {:.6e} exceeds two standard errors ({:.6e}); \
                 possible drift — heuristic flag, not a stationarity test",
                self.mean, self.std_error,
            ));
        }
        out
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

/// Reads the configured column into a loss sample.
///
/// Lines starting with `#` are skipped, percent units are divided by 100,
/// and returns are negated into losses unless disabled. Any non-numeric or
/// non-finite cell fails ingestion with its row named.
pub fn ingest(config: &IngestConfig) -> CliResult<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(config.header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(&config.path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", config.path.display())))?;

    let index = resolve_column(&mut reader, config)?;
    let source = file_name(&config.path);

    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| CliError::data(format!("{source}: malformed row: {e}")))?;
        let line = record
            .position()
            .map(|pos| pos.line())
            .unwrap_or(row as u64 + 1);
        let cell = record.get(index).ok_or_else(|| {
            CliError::data(format!(
                "{source}, row {line}: no column {index} (record has {} fields)",
                record.len()
            ))
        })?;
        let value: f64 = cell.parse().map_err(|_| {
            CliError::data(format!(
                "{source}, row {line}: cannot parse '{cell}' as a number"
            ))
        })?;
        if !value.is_finite() {
            return Err(CliError::data(format!(
                "{source}, row {line}: non-finite value '{cell}'"
            )));
        }
        let scaled = match config.units {
            Units::Decimal => value,
            Units::Percent => value / 100.0,
        };
        values.push(scaled);
    }

    if values.is_empty() {
        return Err(CliError::data(format!("{source}: empty series")));
    }

    let (sample, sign_convention) = if config.negate_returns {
        (
            EmpiricalSample::from_negated_returns(&values),
            "losses-positive (loss = -return)",
        )
    } else {
        (
            EmpiricalSample::from_losses(&values),
            "losses-positive (input taken as losses)",
        )
    };
    let sample = sample.map_err(|e| CliError::data(format!("{source}: {e}")))?;

    let n = sample.len();
    let mean = sample.sorted().iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let ss: f64 = sample
            .sorted()
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum();
        (ss / (n as f64 - 1.0)).sqrt() / (n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    let drift_flagged = std_error.is_finite() && mean.abs() > 2.0 * std_error;

    Ok(Ingested {
        sample,
        source,
        n,
        mean,
        std_error,
        drift_flagged,
        sign_convention,
    })
}

/// Maps the configured column to a field index: a numeric string is an
/// index; anything else is looked up in the header row.
fn resolve_column(
    reader: &mut csv::Reader<std::fs::File>,
    config: &IngestConfig,
) -> CliResult<usize> {
    if let Ok(index) = config.column.parse::<usize>() {
        return Ok(index);
    }
    if !config.header {
        return Err(CliError::usage(format!(
            "column '{}' is not an index; selecting by name requires --header",
            config.column
        )));
    }
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("cannot read header row: {e}")))?;
    headers
        .iter()
        .position(|h| h == config.column)
        .ok_or_else(|| {
            let available: Vec<&str> = headers.iter().collect();
            CliError::usage(format!(
                "column '{}' not found; header has: {}",
                config.column,
                available.join(", ")
            ))
        })
}
