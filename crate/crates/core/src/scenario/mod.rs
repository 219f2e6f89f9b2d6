//! Config-driven verification runs.
//!
//! A run parses a [`ScenarioConfig`], executes the registered pipeline for its
//! scenario and produces a [`ScenarioReport`] plus optional CSV dumps. Reports
//! are deterministic apart from `wall_time_seconds`.

pub mod config;
pub mod csv;
mod pipelines;
pub mod registry;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::error::LabError;
pub use config::{FieldKind, ScenarioConfig};
pub use csv::{emit_csv, CsvData};
pub use registry::{list_scenarios, CheckKind, CheckSpec, ScenarioInfo};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario `{scenario}` failed during {stage}: {source}")]
    Module {
        scenario: String,
        stage: String,
        #[source]
        source: LabError,
    },
}

impl ScenarioError {
    /// Exit status for the command line; check failures use 1.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    /// Effective tolerance after scaling; absent for flags.
    pub tolerance: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub scenario: String,
    pub description: String,
    pub config: ScenarioConfig,
    pub tolerance_scale: f64,
    pub metrics: BTreeMap<String, f64>,
    pub expectations: BTreeMap<String, f64>,
    pub checks: Vec<CheckOutcome>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub wall_time_seconds: f64,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// JSON with the wall time zeroed, for comparing runs.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_seconds = 0.0;
        copy.to_json()
    }

    pub fn failed_checks(&self) -> Vec<&CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Report together with the CSV dumps a pipeline produced.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    /// `(file name, data)` pairs, written below the CSV directory.
    pub dumps: Vec<(String, CsvData)>,
}

/// Collects metrics while a pipeline runs.
#[derive(Debug, Default)]
pub(crate) struct Recorder {
    metrics: BTreeMap<String, f64>,
    expectations: BTreeMap<String, f64>,
    notes: Vec<String>,
    dumps: Vec<(String, CsvData)>,
}

impl Recorder {
    pub(crate) fn metric(&mut self, name: &str, value: f64) {
        let previous = self.metrics.insert(name.to_string(), value);
        debug_assert!(previous.is_none(), "metric {name} recorded twice");
    }

    pub(crate) fn flag(&mut self, name: &str, held: bool) {
        self.metric(name, if held { 1.0 } else { 0.0 });
    }

    pub(crate) fn expectation(&mut self, name: &str, value: f64) {
        self.expectations.insert(name.to_string(), value);
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub(crate) fn dump(&mut self, file: &str, data: CsvData) {
        self.dumps.push((file.to_string(), data));
    }
}

/// Wraps module errors with the scenario and stage they came from.
pub(crate) trait Stage<T> {
    fn stage(self, scenario: &str, stage: &str) -> Result<T, ScenarioError>;
}

impl<T> Stage<T> for crate::error::Result<T> {
    fn stage(self, scenario: &str, stage: &str) -> Result<T, ScenarioError> {
        self.map_err(|source| ScenarioError::Module {
            scenario: scenario.to_string(),
            stage: stage.to_string(),
            source,
        })
    }
}

/// Runs a scenario without touching the filesystem.
///
/// Tolerances are the registered defaults overridden by the config, all
/// multiplied by `tolerance_scale`.
pub fn evaluate(config: &ScenarioConfig, tolerance_scale: f64) -> Result<ScenarioOutcome, ScenarioError> {
    config.validate()?;
    if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
        return Err(ScenarioError::Config {
            key: "--tolerance-scale".into(),
            message: format!("must be finite and positive, got {tolerance_scale}"),
        });
    }
    let info = registry::find(&config.scenario).expect("validated scenario");
    let start = Instant::now();
    let mut rec = Recorder::default();
    pipelines::run(info.name, config, &mut rec)?;
    let wall_time_seconds = start.elapsed().as_secs_f64();

    let checks: Vec<CheckOutcome> = info
        .checks
        .iter()
        .map(|spec| {
            let value = *rec
                .metrics
                .get(spec.name)
                .unwrap_or_else(|| panic!("pipeline {} did not record {}", info.name, spec.name));
            match spec.kind {
                CheckKind::AtMost => {
                    let tolerance = config.run.tolerances.get(spec.name).copied().unwrap_or(spec.tolerance) * tolerance_scale;
                    CheckOutcome {
                        name: spec.name.to_string(),
                        value,
                        tolerance: Some(tolerance),
                        passed: value <= tolerance,
                    }
                }
                CheckKind::Flag => CheckOutcome {
                    name: spec.name.to_string(),
                    value,
                    tolerance: None,
                    passed: value == 1.0,
                },
            }
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    let report = ScenarioReport {
        schema_version: SCHEMA_VERSION,
        scenario: info.name.to_string(),
        description: info.description.to_string(),
        config: config.clone(),
        tolerance_scale,
        metrics: rec.metrics,
        expectations: rec.expectations,
        checks,
        notes: rec.notes,
        passed,
        wall_time_seconds,
    };
    Ok(ScenarioOutcome {
        report,
        dumps: rec.dumps,
    })
}

/// Writes the report and dumps to the paths named in the config's `output` section.
pub fn write_outputs(outcome: &ScenarioOutcome) -> Result<(), ScenarioError> {
    let output = &outcome.report.config.output;
    if let Some(path) = &output.report_path {
        write_report(&outcome.report, path)?;
    }
    if let Some(dir) = &output.csv_dir {
        write_dumps(&outcome.dumps, dir)?;
    }
    Ok(())
}

pub fn write_report(report: &ScenarioReport, path: &Path) -> Result<(), ScenarioError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::write(path, report.to_json()).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_dumps(dumps: &[(String, CsvData)], dir: &Path) -> Result<(), ScenarioError> {
    create_dir(dir)?;
    for (file, data) in dumps {
        emit_csv(data, &dir.join(file))?;
    }
    Ok(())
}

fn create_dir(dir: &Path) -> Result<(), ScenarioError> {
    std::fs::create_dir_all(dir).map_err(|source| ScenarioError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Evaluates with unit tolerance scale and writes the configured outputs.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport, ScenarioError> {
    let outcome = evaluate(config, 1.0)?;
    write_outputs(&outcome)?;
    Ok(outcome.report)
}
