//! Command implementations for the `egs` binary.
//!
//! The binary is a thin shell around this library so the integration tests
//! can drive the same code paths the user does: ingestion, measure
//! dispatch, the risk-report grid, the axiom suite, and the sensitivity
//! report.

pub mod cli;
pub mod compute;
pub mod errors;
pub mod ingest;
pub mod report;
pub mod sense;
pub mod verify_cmd;

pub use cli::{run, Cli};
pub use errors::{CliError, CliResult};
