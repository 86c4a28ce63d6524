//! Batch driver for the stable-pgf experiments: each experiment validates
//! its parameters, runs a computation from the core crate, checks its
//! assertions and writes a JSON report (plus CSV data where useful).

pub mod experiments;
pub mod output;
pub mod params;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use params::{ParamSpec, Params};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] stable_pgf::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Configuration problems exit with 2; computation errors count as a
    /// failed experiment.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(stable_pgf::Error::InvalidParameter(_)) => 2,
            _ => 1,
        }
    }
}

/// A single assertion of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: Value,
    pub threshold: Value,
}

impl Check {
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value < threshold, value: json!(value), threshold: json!(threshold) }
    }

    pub fn holds(name: &str, passed: bool, value: Value) -> Self {
        Self { name: name.into(), passed, value, threshold: Value::Null }
    }
}

/// Result of running an experiment.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub report: Value,
    /// `(file name, contents)` of CSV artifacts.
    pub csv: Vec<(String, String)>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub struct Experiment {
    pub name: &'static str,
    /// The claim being tested.
    pub anchor: &'static str,
    pub summary: &'static str,
    pub params: fn() -> Vec<ParamSpec>,
    /// CSV files written, with their columns.
    pub csv: &'static [(&'static str, &'static str)],
    pub run: fn(&Params, u64) -> Result<Outcome, CliError>,
}

pub fn find(name: &str) -> Result<&'static Experiment, CliError> {
    experiments::ALL
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CliError::Config(format!("unknown experiment `{name}`")))
}

/// Machine-readable description of an experiment.
pub fn describe(e: &Experiment) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "name": e.name,
        "anchor": e.anchor,
        "summary": e.summary,
        "params": (e.params)(),
        "csv": e.csv.iter().map(|(f, cols)| json!({"file": f, "columns": cols.split(',').collect::<Vec<_>>()})).collect::<Vec<_>>(),
    })
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Overrides the experiment's pass threshold (`tol` parameter).
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20240601;

/// Resolves parameters (config, then `overrides`, then `tol`), runs the
/// experiment and assembles its JSON document.
pub fn execute(e: &Experiment, cfg: &ExperimentConfig, overrides: &[(String, Value)]) -> Result<(Value, Outcome), CliError> {
    let mut given = cfg.params.clone();
    for (k, v) in overrides {
        given.insert(k.clone(), v.clone());
    }
    let schema = (e.params)();
    if let Some(tol) = cfg.tol {
        if !schema.iter().any(|s| s.name == "tol") {
            return Err(CliError::Config(format!("`{}` has no tolerance to override", e.name)));
        }
        given.insert("tol".into(), json!(tol));
    }
    let params = Params::resolve(&schema, &given)?;
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let outcome = (e.run)(&params, seed)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": e.name,
        "anchor": e.anchor,
        "seed": seed,
        "params": params.to_value(),
        "passed": outcome.passed(),
        "checks": outcome.checks,
        "report": outcome.report,
    });
    Ok((doc, outcome))
}
