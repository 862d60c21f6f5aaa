//! Configuration-driven scenario runner for `qthermo`.
//!
//! A run reads one JSON configuration, executes the named scenario and
//! writes CSV tables plus a `manifest.json` that holds the fully resolved
//! configuration. Replaying a manifest reproduces the tables byte for byte.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod overrides;
pub mod scenarios;

use std::fs;
use std::path::Path;

pub use config::{Scenario, ScenarioConfig};
pub use error::CliError;
pub use output::{Manifest, Table, MANIFEST_FILE};

pub const TOOL_NAME: &str = "qthermo";

/// Runs `config` and writes its tables and manifest into `out`.
pub fn run_to_dir(config: &ScenarioConfig, out: &Path) -> Result<Manifest, CliError> {
    let result = scenarios::run(config)?;
    fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", out.display())))?;
    let mut outputs = Vec::new();
    for (name, table) in &result.tables {
        table.write(&out.join(name))?;
        outputs.push(name.clone());
    }
    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        outputs,
        extras: result.extras,
    };
    manifest.write(out)?;
    Ok(manifest)
}

/// Re-runs the configuration recorded in a manifest.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<Manifest, CliError> {
    let recorded = Manifest::load(manifest_path)?;
    run_to_dir(&recorded.config, out)
}
