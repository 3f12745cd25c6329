//! Scenario file format: versioned TOML, documented in `docs/scenario-format.md`.
//!
//! Serialization is deterministic (struct field order, sorted maps), so
//! `load -> save` round-trips byte-identically.

use super::{
    ComponentType, HardwareComponent, Implementation, Request, Scenario, ScenarioError,
    ScenarioMeta,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Current scenario file format version.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ScenarioFile {
    version: u32,
    meta: ScenarioMeta,
    component_types: Vec<ComponentType>,
    implementations: Vec<Implementation>,
    hardware: Vec<HardwareComponent>,
    requests: Vec<Request>,
}

#[derive(Deserialize)]
struct VersionProbe {
    #[serde(default)]
    version: Option<u32>,
}

/// Parse a scenario from TOML text. Rejects unknown versions before full
/// schema checks; validates the result structurally.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let probe: VersionProbe =
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    match probe.version {
        Some(FORMAT_VERSION) => {}
        Some(found) => {
            return Err(ScenarioError::UnsupportedVersion {
                found,
                supported: FORMAT_VERSION,
            })
        }
        None => {
            return Err(ScenarioError::Parse(
                "missing required field `version`".to_string(),
            ))
        }
    }
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let scenario = Scenario {
        meta: file.meta,
        component_types: file.component_types,
        implementations: file.implementations,
        hardware: file.hardware,
        requests: file.requests,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Serialize a scenario to TOML text (deterministic byte layout).
pub fn scenario_to_string(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        version: FORMAT_VERSION,
        meta: scenario.meta.clone(),
        component_types: scenario.component_types.clone(),
        implementations: scenario.implementations.clone(),
        hardware: scenario.hardware.clone(),
        requests: scenario.requests.clone(),
    };
    toml::to_string(&file).expect("scenario serialization cannot fail")
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<(), ScenarioError> {
    std::fs::write(path, scenario_to_string(scenario)).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}
