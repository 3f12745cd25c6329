//! Named scenario families: thirteen comparison presets spanning request
//! counts from 1 to 50 with "much hardware" and "complex software" variants,
//! plus the `chain4` sweep family (4 requests, each a depth-4 implementation
//! chain) whose hardware count is meant to be scaled.

use qmap_core::model::{generate_scenario, Scenario};
use qmap_core::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family {
    pub name: &'static str,
    pub requests: usize,
    pub hardware_scale: f64,
    pub depth: usize,
    pub branching: usize,
}

/// All presets. The first thirteen are the comparison-table rows; `chain4`
/// is the scaling family (override its hardware scale per sweep point).
#[rustfmt::skip]
pub const FAMILIES: &[Family] = &[
    Family { name: "trivial", requests: 1, hardware_scale: 1.0, depth: 1, branching: 1 },
    Family { name: "small", requests: 1, hardware_scale: 5.0, depth: 2, branching: 2 },
    Family { name: "small-much-hardware", requests: 1, hardware_scale: 15.0, depth: 2, branching: 2 },
    Family { name: "small-complex", requests: 1, hardware_scale: 47.0, depth: 5, branching: 4 },
    Family { name: "medium", requests: 12, hardware_scale: 68.0, depth: 2, branching: 3 },
    Family { name: "medium-much-hardware", requests: 12, hardware_scale: 225.0, depth: 2, branching: 3 },
    Family { name: "medium-complex", requests: 12, hardware_scale: 465.0, depth: 4, branching: 4 },
    Family { name: "large", requests: 20, hardware_scale: 90.0, depth: 2, branching: 3 },
    Family { name: "large-much-hardware", requests: 20, hardware_scale: 300.0, depth: 2, branching: 3 },
    Family { name: "large-complex", requests: 20, hardware_scale: 930.0, depth: 5, branching: 4 },
    Family { name: "huge", requests: 50, hardware_scale: 225.0, depth: 2, branching: 3 },
    Family { name: "huge-much-hardware", requests: 50, hardware_scale: 750.0, depth: 2, branching: 3 },
    Family { name: "huge-complex", requests: 50, hardware_scale: 2325.0, depth: 4, branching: 4 },
    Family { name: "chain4", requests: 4, hardware_scale: 64.0, depth: 4, branching: 1 },
];

pub fn family(name: &str) -> Option<&'static Family> {
    FAMILIES.iter().find(|f| f.name == name)
}

/// The comparison-table presets (everything except the scaling family).
pub fn table_families() -> Vec<&'static Family> {
    FAMILIES.iter().filter(|f| f.name != "chain4").collect()
}

pub fn family_names() -> Vec<&'static str> {
    FAMILIES.iter().map(|f| f.name).collect()
}

impl Family {
    pub fn generate(&self, seed: u64) -> Result<Scenario, ScenarioError> {
        generate_scenario(
            self.requests,
            self.hardware_scale,
            self.depth,
            self.branching,
            seed,
        )
    }

    /// Generate with a different hardware count (the scaling sweep).
    pub fn generate_scaled(
        &self,
        hardware_scale: f64,
        seed: u64,
    ) -> Result<Scenario, ScenarioError> {
        generate_scenario(
            self.requests,
            hardware_scale,
            self.depth,
            self.branching,
            seed,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_presets_with_unique_names() {
        assert_eq!(FAMILIES.len(), 14);
        let mut names = family_names();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 14);
        assert_eq!(table_families().len(), 13);
    }

    #[test]
    fn presets_generate_valid_scenarios() {
        for name in ["trivial", "small", "medium", "chain4"] {
            let f = family(name).unwrap();
            let s = f.generate(1).unwrap();
            s.validate().unwrap();
            assert_eq!(s.requests.len(), f.requests);
            assert_eq!(s.hardware.len(), f.hardware_scale as usize);
        }
    }

    #[test]
    fn resource_counts_match_the_comparison_presets() {
        let expected: &[(&str, usize)] = &[
            ("trivial", 1),
            ("small", 5),
            ("small-much-hardware", 15),
            ("small-complex", 47),
            ("medium", 68),
            ("medium-much-hardware", 225),
            ("medium-complex", 465),
            ("large", 90),
            ("large-much-hardware", 300),
            ("large-complex", 930),
            ("huge", 225),
            ("huge-much-hardware", 750),
            ("huge-complex", 2325),
        ];
        for &(name, resources) in expected {
            assert_eq!(family(name).unwrap().hardware_scale as usize, resources);
        }
    }
}
