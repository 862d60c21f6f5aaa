//! Scenario configuration.
//!
//! A configuration names one scenario and carries the matching section.
//! Unknown keys are rejected everywhere so that typos fail loudly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qthermo::models::{ChemSpec, LevelsSpec, PvSpec};
use qthermo::Tolerances;

use crate::error::CliError;
use crate::overrides::apply_override;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Evolve,
    PvSweep,
    ChemEngine,
    Replicator,
    EnginePower,
}

impl Scenario {
    /// Name of the configuration section the scenario reads.
    pub fn section(self) -> &'static str {
        match self {
            Scenario::Evolve => "evolve",
            Scenario::PvSweep => "pv_sweep",
            Scenario::ChemEngine => "chem_engine",
            Scenario::Replicator => "replicator",
            Scenario::EnginePower => "engine_power",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pv_sweep: Option<PvSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chem_engine: Option<ChemEngineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicator: Option<ReplicatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine_power: Option<EnginePowerConfig>,
}

/// Driven level model propagated with the thermodynamic bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub model: LevelsSpec,
    /// Initial populations in the level basis; maximally mixed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_populations: Option<Vec<f64>>,
    pub t_max: f64,
    pub steps: usize,
}

/// Power-voltage curve of a photovoltaic cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvSweepConfig {
    pub cell: PvSpec,
    #[serde(default)]
    pub v_min: f64,
    /// Upper end of the sweep; `1.2 * V_oc` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    25
}

/// Pumped oscillator started in a coherent state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChemEngineConfig {
    pub oscillator: ChemSpec,
    /// Initial coherent amplitude as `[re, im]`.
    pub alpha0: [f64; 2],
    pub t_max: f64,
    pub steps: usize,
}

/// Birth-death ensemble against its master equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicatorConfig {
    pub n0: u64,
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub t_max: f64,
    pub steps: usize,
    pub trajectories: usize,
    /// Truncation of the master equation.
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_levels() -> usize {
    200
}

/// Average power of a weakly driven level model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnginePowerConfig {
    pub model: LevelsSpec,
    /// Finite-difference step; scaled from the spectra when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl ScenarioConfig {
    /// Parses a JSON document, applying `key=value` overrides first.
    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        for entry in overrides {
            apply_override(&mut value, entry)?;
        }
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, CliError> {
        let config: Self = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })?;
        config.check_section()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text, overrides)
    }

    fn check_section(&self) -> Result<(), CliError> {
        let present = match self.scenario {
            Scenario::Evolve => self.evolve.is_some(),
            Scenario::PvSweep => self.pv_sweep.is_some(),
            Scenario::ChemEngine => self.chem_engine.is_some(),
            Scenario::Replicator => self.replicator.is_some(),
            Scenario::EnginePower => self.engine_power.is_some(),
        };
        if present {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "{}: section required by the selected scenario is missing",
                self.scenario.section()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REPLICATOR: &str = r#"{
        "scenario": "replicator",
        "seed": 3,
        "replicator": {"n0": 2, "gamma_up": 0.1, "gamma_down": 0.2,
                       "t_max": 1.0, "steps": 4, "trajectories": 10}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = ScenarioConfig::from_json(REPLICATOR, &[]).unwrap();
        assert_eq!(c.scenario, Scenario::Replicator);
        assert_eq!(c.replicator.unwrap().levels, 200);
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let text = REPLICATOR.replace("\"steps\"", "\"stepz\"");
        match ScenarioConfig::from_json(&text, &[]) {
            Err(CliError::Config(msg)) => assert!(msg.starts_with("replicator"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_section() {
        let text = r#"{"scenario": "evolve"}"#;
        match ScenarioConfig::from_json(text, &[]) {
            Err(CliError::Config(msg)) => assert!(msg.starts_with("evolve:")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overrides_apply_before_parsing() {
        let c = ScenarioConfig::from_json(REPLICATOR, &["replicator.n0=7".into()]).unwrap();
        assert_eq!(c.replicator.unwrap().n0, 7);
    }
}
