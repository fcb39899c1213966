//! Reports produced by subcommands, and how they reach the disk.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use gaplab::ensemble::EnsembleSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Settings;

/// A pass/fail hook evaluated after an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Where per-trial records live and how to regenerate them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialLog {
    pub file: String,
    pub ensemble: EnsembleSpec,
    pub tol_factor: f64,
}

#[derive(Debug, Default)]
pub struct Report {
    /// Files in write order; the first is printed when there is no output
    /// directory.
    pub files: Vec<(String, String)>,
    pub details: Value,
    pub checks: Vec<Check>,
    pub trial_log: Option<TrialLog>,
}

impl Report {
    pub fn new(primary: &str, contents: String) -> Self {
        Report {
            files: vec![(primary.to_string(), contents)],
            details: Value::Null,
            ..Report::default()
        }
    }

    pub fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }

    pub fn details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn check(mut self, check: Check) -> Self {
        self.checks.push(check);
        self
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub settings: Value,
    pub details: Value,
    pub trial_log: Option<TrialLog>,
    pub artifacts: Vec<String>,
    pub checks: Vec<Check>,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writes every file of `report` and a `manifest.json` into `dir`.
pub fn write_report(dir: &Path, command: &str, settings: &Settings, report: &Report, started: u64) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, contents) in &report.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    let manifest = Manifest {
        tool: "gaplab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        started_unix: started,
        finished_unix: unix_now(),
        settings: serde_json::to_value(settings)?,
        details: report.details.clone(),
        trial_log: report.trial_log.clone(),
        artifacts: report.files.iter().map(|(n, _)| n.clone()).collect(),
        checks: report.checks.clone(),
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
