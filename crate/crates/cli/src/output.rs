//! CSV tables and the run manifest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::ScenarioConfig;
use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

/// A header row and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Writes the table with 17 significant digits per value, enough to
    /// round-trip every `f64`.
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: csv::Error| CliError::Io(format!("writing {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:.16e}"))).map_err(io)?;
        }
        w.flush()
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ScenarioConfig,
    pub outputs: Vec<String>,
    pub extras: Map<String, Value>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("serialising manifest: {e}")))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid manifest JSON: {e}")))?;
        let config = value
            .get("config")
            .cloned()
            .ok_or_else(|| CliError::Config("manifest has no config".into()))?;
        let config = ScenarioConfig::from_value(config).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("config.{msg}")),
            other => other,
        })?;
        let mut manifest: Manifest = serde_json::from_value(value)
            .map_err(|e| CliError::Config(format!("invalid manifest: {e}")))?;
        manifest.config = config;
        Ok(manifest)
    }
}
