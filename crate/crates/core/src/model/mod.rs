//! Domain model: component types, implementations, hardware, requests.
//!
//! A [`Scenario`] is one complete problem instance. Implementations of a
//! component type may require further component types (forming a requirement
//! tree per request), consume hardware resources per serving task, and
//! provide non-functional properties (NFPs) that requests and parent
//! implementations constrain with min/max windows.

mod compiled;
mod file;
mod generate;
mod tasks;

pub use compiled::{
    milli, Compiled, CompiledHw, CompiledImpl, CompiledRequest, CompiledSubReq, Task,
};
pub use file::{
    load_scenario, parse_scenario_str, save_scenario, scenario_to_string, FORMAT_VERSION,
};
pub use generate::{generate_scenario, generate_scenario_with_witness, Witness, WitnessSlot};
pub use tasks::{compute_max_assignments, decompose_tasks, TaskView};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// The closed set of hardware resource kinds. Every hardware component
/// declares a capacity and an energy coefficient for each kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    Cpu,
    Ram,
    Disk,
    Network,
}

pub const RESOURCE_KINDS: [ResourceKind; 4] = [
    ResourceKind::Cpu,
    ResourceKind::Ram,
    ResourceKind::Disk,
    ResourceKind::Network,
];

impl ResourceKind {
    pub fn index(self) -> usize {
        match self {
            ResourceKind::Cpu => 0,
            ResourceKind::Ram => 1,
            ResourceKind::Disk => 2,
            ResourceKind::Network => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ResourceKind::Cpu => "cpu",
            ResourceKind::Ram => "ram",
            ResourceKind::Disk => "disk",
            ResourceKind::Network => "network",
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One quantity per resource kind, indexed by [`ResourceKind`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "ResourceMapRepr", into = "ResourceMapRepr")]
pub struct ResourceMap(pub [f64; 4]);

impl ResourceMap {
    pub fn get(&self, kind: ResourceKind) -> f64 {
        self.0[kind.index()]
    }

    pub fn set(&mut self, kind: ResourceKind, value: f64) {
        self.0[kind.index()] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (ResourceKind, f64)> + '_ {
        RESOURCE_KINDS.iter().map(move |&k| (k, self.get(k)))
    }
}

#[derive(Serialize, Deserialize)]
struct ResourceMapRepr {
    #[serde(default)]
    cpu: f64,
    #[serde(default)]
    ram: f64,
    #[serde(default)]
    disk: f64,
    #[serde(default)]
    network: f64,
}

impl From<ResourceMapRepr> for ResourceMap {
    fn from(r: ResourceMapRepr) -> Self {
        ResourceMap([r.cpu, r.ram, r.disk, r.network])
    }
}

impl From<ResourceMap> for ResourceMapRepr {
    fn from(m: ResourceMap) -> Self {
        ResourceMapRepr {
            cpu: m.0[0],
            ram: m.0[1],
            disk: m.0[2],
            network: m.0[3],
        }
    }
}

/// Named numeric NFP levels, e.g. `{"resolution": 60.0}`.
pub type NfpMap = BTreeMap<String, f64>;

/// A compute resource with per-kind capacities and energy coefficients
/// (energy units per resource unit consumed on it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HardwareComponent {
    pub id: String,
    pub capacities: ResourceMap,
    pub energy_coeff: ResourceMap,
}

/// A unit of functionality with selectable implementations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ComponentType {
    pub id: String,
    pub name: String,
}

/// A selectable variant of a component type (implementation and execution
/// mode flattened into one entity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Implementation {
    pub id: String,
    pub of_type: String,
    /// Provided NFP levels.
    pub provides: NfpMap,
    /// Resource demand per serving task.
    pub resource_req: ResourceMap,
    /// Component types this implementation needs underneath it.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub requires: Vec<SubRequirement>,
}

/// A requirement on a child component: which type, and the NFP window its
/// chosen implementation must provide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SubRequirement {
    pub required_type: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nfp_min: NfpMap,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nfp_max: NfpMap,
}

/// A user request: a target component type plus the NFP window the serving
/// implementation must provide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Request {
    pub id: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nfp_min: NfpMap,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nfp_max: NfpMap,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioMeta {
    pub seed: u64,
    pub family: String,
}

/// A complete problem instance. Immutable after construction; shared freely
/// across concurrent solver and tuner runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Scenario {
    pub meta: ScenarioMeta,
    pub component_types: Vec<ComponentType>,
    pub implementations: Vec<Implementation>,
    pub hardware: Vec<HardwareComponent>,
    pub requests: Vec<Request>,
}

impl Scenario {
    /// Structural validation: unique ids, referential integrity, sign and
    /// bound checks, and at least one implementation per referenced type.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut type_ids = BTreeMap::new();
        for (i, t) in self.component_types.iter().enumerate() {
            if type_ids.insert(t.id.clone(), i).is_some() {
                return Err(ScenarioError::DuplicateId {
                    kind: "componentType",
                    id: t.id.clone(),
                });
            }
        }
        let mut impl_ids = BTreeMap::new();
        for (i, im) in self.implementations.iter().enumerate() {
            if impl_ids.insert(im.id.clone(), i).is_some() {
                return Err(ScenarioError::DuplicateId {
                    kind: "implementation",
                    id: im.id.clone(),
                });
            }
        }
        let mut hw_ids = BTreeMap::new();
        for (i, h) in self.hardware.iter().enumerate() {
            if hw_ids.insert(h.id.clone(), i).is_some() {
                return Err(ScenarioError::DuplicateId {
                    kind: "hardware",
                    id: h.id.clone(),
                });
            }
        }
        let mut req_ids = BTreeMap::new();
        for (i, r) in self.requests.iter().enumerate() {
            if req_ids.insert(r.id.clone(), i).is_some() {
                return Err(ScenarioError::DuplicateId {
                    kind: "request",
                    id: r.id.clone(),
                });
            }
        }

        let mut dangling = Vec::new();
        for im in &self.implementations {
            if !type_ids.contains_key(&im.of_type) {
                dangling.push(format!("implementation {} ofType {}", im.id, im.of_type));
            }
            for sub in &im.requires {
                if !type_ids.contains_key(&sub.required_type) {
                    dangling.push(format!(
                        "implementation {} requires {}",
                        im.id, sub.required_type
                    ));
                }
            }
        }
        for r in &self.requests {
            if !type_ids.contains_key(&r.target) {
                dangling.push(format!("request {} target {}", r.id, r.target));
            }
        }
        if !dangling.is_empty() {
            return Err(ScenarioError::DanglingIds(dangling));
        }

        for h in &self.hardware {
            for (kind, v) in h.capacities.iter() {
                if v < 0.0 || !v.is_finite() {
                    return Err(ScenarioError::BadQuantity {
                        what: format!("hardware {} capacity {kind}", h.id),
                        value: v,
                    });
                }
            }
            for (kind, v) in h.energy_coeff.iter() {
                if v < 0.0 || !v.is_finite() {
                    return Err(ScenarioError::BadQuantity {
                        what: format!("hardware {} energyCoeff {kind}", h.id),
                        value: v,
                    });
                }
            }
        }
        for im in &self.implementations {
            for (kind, v) in im.resource_req.iter() {
                if v < 0.0 || !v.is_finite() {
                    return Err(ScenarioError::BadQuantity {
                        what: format!("implementation {} resourceReq {kind}", im.id),
                        value: v,
                    });
                }
            }
            for sub in &im.requires {
                check_window(&sub.nfp_min, &sub.nfp_max, || {
                    format!("implementation {} requires {}", im.id, sub.required_type)
                })?;
            }
        }
        for r in &self.requests {
            check_window(&r.nfp_min, &r.nfp_max, || format!("request {}", r.id))?;
        }

        // Every type referenced by a request or a sub-requirement needs at
        // least one implementation.
        let mut has_impl = vec![false; self.component_types.len()];
        for im in &self.implementations {
            has_impl[type_ids[&im.of_type]] = true;
        }
        let mut missing = Vec::new();
        let mut referenced = vec![false; self.component_types.len()];
        for r in &self.requests {
            referenced[type_ids[&r.target]] = true;
        }
        for im in &self.implementations {
            for sub in &im.requires {
                referenced[type_ids[&sub.required_type]] = true;
            }
        }
        for (i, t) in self.component_types.iter().enumerate() {
            if referenced[i] && !has_impl[i] {
                missing.push(t.id.clone());
            }
        }
        if !missing.is_empty() {
            return Err(ScenarioError::MissingImplementations(missing));
        }
        if !self.requests.is_empty() && self.hardware.is_empty() {
            return Err(ScenarioError::NoHardware);
        }
        Ok(())
    }

    pub fn type_index(&self, id: &str) -> Option<usize> {
        self.component_types.iter().position(|t| t.id == id)
    }

    pub fn implementation_index(&self, id: &str) -> Option<usize> {
        self.implementations.iter().position(|i| i.id == id)
    }

    pub fn hardware_index(&self, id: &str) -> Option<usize> {
        self.hardware.iter().position(|h| h.id == id)
    }

    pub fn request_index(&self, id: &str) -> Option<usize> {
        self.requests.iter().position(|r| r.id == id)
    }
}

fn check_window<F: Fn() -> String>(
    min: &NfpMap,
    max: &NfpMap,
    ctx: F,
) -> Result<(), ScenarioError> {
    for (name, lo) in min {
        if let Some(hi) = max.get(name) {
            if lo > hi {
                return Err(ScenarioError::InvertedWindow {
                    what: ctx(),
                    nfp: name.clone(),
                    min: *lo,
                    max: *hi,
                });
            }
        }
    }
    Ok(())
}

/// Does `provides` satisfy the `[min, max]` window? A provided level absent
/// from the map counts as 0.
pub fn window_satisfied(provides: &NfpMap, min: &NfpMap, max: &NfpMap) -> bool {
    for (name, lo) in min {
        if provides.get(name).copied().unwrap_or(0.0) < *lo {
            return false;
        }
    }
    for (name, hi) in max {
        if provides.get(name).copied().unwrap_or(0.0) > *hi {
            return false;
        }
    }
    true
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("duplicate {kind} id: {id}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("dangling id references: {}", .0.join("; "))]
    DanglingIds(Vec<String>),
    #[error("{what}: bad quantity {value}")]
    BadQuantity { what: String, value: f64 },
    #[error("{what}: NFP {nfp} window inverted (min {min} > max {max})")]
    InvertedWindow {
        what: String,
        nfp: String,
        min: f64,
        max: f64,
    },
    #[error("referenced component types without implementations: {}", .0.join(", "))]
    MissingImplementations(Vec<String>),
    #[error("scenario has requests but no hardware components")]
    NoHardware,
    #[error("cyclic component requirements through type {0}")]
    CyclicRequirements(String),
    #[error("unknown id: {0}")]
    UnknownId(String),
    #[error("unsupported scenario format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("io error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsatisfiable generator parameters: {0}")]
    UnsatisfiableGenerator(String),
    #[error("invalid generator parameters: {0}")]
    InvalidGeneratorParams(String),
}
