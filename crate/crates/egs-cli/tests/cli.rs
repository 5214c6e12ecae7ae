//! End-to-end tests of the `egs` binary: exit codes, stream discipline
//! (payload on stdout, warnings on stderr), JSON determinism, and the
//! ingestion conventions.

use std::process::{Command, Output};

fn egs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egs"))
        .args(args)
        .output()
        .expect("the binary should spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (signal?)")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

fn value_of(out: &Output) -> f64 {
    json(out)["value"].as_f64().expect("result has a value")
}

fn rel_close(a: f64, b: f64, tol: f64) {
    let scale = a.abs().max(b.abs()).max(1e-300);
    assert!(
        (a - b).abs() <= tol * scale,
        "{a} vs {b} beyond relative {tol}"
    );
}

#[test]
fn compute_reference_value_and_help_exit_zero() {
    let out = egs(&[
        "compute", "--measure", "es", "--dist", "normal", "--p", "0.975", "--json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v = value_of(&out);
    assert!((v - 2.3378).abs() < 5e-5, "ES(normal, 0.975) = {v}");
    assert_eq!(json(&out)["method"], "analytic");

    assert_eq!(code(&egs(&["--help"])), 0);
    assert_eq!(code(&egs(&["compute", "--help"])), 0);
    assert_eq!(code(&egs(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    // Unknown flag (parser error).
    let out = egs(&["compute", "--nope"]);
    assert_eq!(code(&out), 1);

    // No source selected.
    let out = egs(&["compute", "--measure", "es", "--p", "0.9"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("choose a source"), "{}", stderr(&out));

    // The two loading flags are mutually exclusive.
    let out = egs(&[
        "compute", "--measure", "egs", "--dist", "normal", "--p", "0.9", "--r", "2",
        "--lambda", "0.1", "--lambda-frac", "0.5",
    ]);
    assert_eq!(code(&out), 1);

    // Student-t needs its degrees of freedom.
    let out = egs(&["compute", "--measure", "gini", "--dist", "student-t"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--dof"), "{}", stderr(&out));

    // A sensitivity level sitting exactly on the kink is rejected up front.
    let out = egs(&["sensitivity", "--p", "0.9", "--r", "2", "--u", "0.9"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("kink"), "{}", stderr(&out));

    // Missing required probability level for a tail measure.
    let out = egs(&["compute", "--measure", "es", "--dist", "normal"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--p"), "{}", stderr(&out));
}

#[test]
fn data_errors_exit_two() {
    let out = egs(&[
        "compute", "--measure", "var", "--p", "0.9", "--input", "no_such_file.csv",
    ]);
    assert_eq!(code(&out), 2);

    let out = egs(&[
        "compute", "--measure", "var", "--p", "0.9", "--input", &data("bad_cell.csv"),
    ]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("cannot parse 'oops'"), "{err}");
    assert!(err.contains("row 3"), "row number missing: {err}");

    let out = egs(&[
        "compute", "--measure", "var", "--p", "0.9", "--input", &data("empty.csv"),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("empty series"), "{}", stderr(&out));
}

#[test]
fn verify_exit_codes_and_json() {
    // Coherent loading: the axiom battery passes.
    let out = egs(&[
        "verify", "--p", "0.9", "--r", "2", "--lambda-frac", "0.5", "--trials", "300",
        "--n", "20",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"), "{}", stdout(&out));

    // Beyond the bound the search must produce a concrete counterexample.
    let out = egs(&[
        "verify", "--p", "0.9", "--r", "2", "--lambda-frac", "1.5", "--n", "50",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("counterexample"), "{}", stdout(&out));

    // A starved search budget is a verification failure.
    let out = egs(&[
        "verify", "--p", "0.9", "--r", "2", "--lambda-frac", "1.5", "--budget", "0",
    ]);
    assert_eq!(code(&out), 3);
    assert!(
        stderr(&out).contains("verification failed"),
        "{}",
        stderr(&out)
    );

    // The JSON payload is still emitted (and parseable) on the failure path.
    let out = egs(&[
        "verify", "--p", "0.9", "--r", "2", "--lambda-frac", "1.5", "--budget", "0",
        "--json",
    ]);
    assert_eq!(code(&out), 3);
    let doc = json(&out);
    assert_eq!(doc["pass"], serde_json::Value::Bool(false));
    assert_eq!(doc["coherent"], serde_json::Value::Bool(false));
}

#[test]
fn report_json_is_byte_identical_across_runs() {
    let args = [
        "report", "--input", &data("daily_returns.csv"), "--header", "--column", "ret",
        "--json",
    ];
    let first = egs(&args);
    let second = egs(&args);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    assert_eq!(first.stdout, second.stdout, "report JSON must not drift");

    let args = [
        "compute", "--measure", "egs", "--dist", "normal", "--p", "0.95", "--r", "3",
        "--json",
    ];
    let first = egs(&args);
    let second = egs(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "compute JSON must not drift");
}

#[test]
fn percent_units_match_decimal_units() {
    for measure in ["var", "es", "gini"] {
        let dec = egs(&[
            "compute", "--measure", measure, "--p", "0.5", "--input",
            &data("two_returns.csv"), "--json",
        ]);
        let pct = egs(&[
            "compute", "--measure", measure, "--p", "0.5", "--units", "percent",
            "--input", &data("two_returns_pct.csv"), "--json",
        ]);
        assert_eq!(code(&dec), 0, "stderr: {}", stderr(&dec));
        assert_eq!(code(&pct), 0, "stderr: {}", stderr(&pct));
        rel_close(value_of(&dec), value_of(&pct), 1e-12);
    }
}

#[test]
fn sign_convention_negates_returns_by_default() {
    // Returns (-0.02, 0.01) become losses (0.02, -0.01); the median-level
    // VaR picks the smaller order statistic.
    let out = egs(&[
        "compute", "--measure", "var", "--p", "0.5", "--input", &data("two_returns.csv"),
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(value_of(&out), -0.01);

    // With --no-negate the numbers are taken as losses directly.
    let out = egs(&[
        "compute", "--measure", "var", "--p", "0.5", "--no-negate", "--input",
        &data("two_returns.csv"), "--json",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(value_of(&out), -0.02);
}

#[test]
fn tail_egini_at_zero_level_matches_egini() {
    let teg = egs(&[
        "compute", "--measure", "teg", "--p", "0", "--r", "3", "--input",
        &data("daily_returns.csv"), "--header", "--column", "ret", "--json",
    ]);
    let egini = egs(&[
        "compute", "--measure", "egini", "--r", "3", "--input",
        &data("daily_returns.csv"), "--header", "--column", "ret", "--json",
    ]);
    assert_eq!(code(&teg), 0, "stderr: {}", stderr(&teg));
    assert_eq!(code(&egini), 0, "stderr: {}", stderr(&egini));
    rel_close(value_of(&teg), value_of(&egini), 1e-12);
}

#[test]
fn report_custom_grid_and_metadata() {
    let out = egs(&[
        "report", "--input", &data("daily_returns.csv"), "--header", "--column", "ret",
        "--p", "0.8", "--r", "2,4", "--seed", "7", "--json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc = json(&out);
    assert_eq!(doc["meta"]["n"], serde_json::json!(250));
    assert_eq!(doc["meta"]["seed"], serde_json::json!(7));
    assert!(doc["meta"]["sign_convention"]
        .as_str()
        .unwrap()
        .contains("losses-positive"));
    let grid = doc["grid"].as_array().unwrap();
    assert_eq!(grid.len(), 1);
    assert_eq!(grid[0]["p"], serde_json::json!(0.8));
    let cells = grid[0]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 2);
    assert_eq!(cells[0]["r"], serde_json::json!(2.0));
    assert_eq!(cells[1]["r"], serde_json::json!(4.0));
    for cell in cells {
        assert_eq!(cell["coherent"], serde_json::Value::Bool(true));
        assert!(cell["egs"].as_f64().unwrap() >= doc["grid"][0]["es"].as_f64().unwrap());
    }
}

#[test]
fn human_table_goes_to_stdout_warnings_to_stderr() {
    let out = egs(&[
        "report", "--input", &data("daily_returns.csv"), "--header", "--column", "ret",
    ]);
    assert_eq!(code(&out), 0);
    let table = stdout(&out);
    assert!(table.contains("extended Gini shortfall report"), "{table}");
    assert!(table.contains("p=95.00%"), "{table}");
    assert!(!stdout(&out).contains("warning:"), "warnings belong on stderr");

    // An incoherent loading must warn on stderr while stdout keeps the value.
    let out = egs(&[
        "compute", "--measure", "egs", "--dist", "uniform", "--p", "0.9", "--r", "2",
        "--lambda-frac", "1.25",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("warning:"), "{}", stderr(&out));
    assert!(stdout(&out).contains("egs ="), "{}", stdout(&out));
}
