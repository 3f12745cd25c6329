//! Discrete search spaces: ordered parameters with ordered value lists.

use qmap_core::solver::{parameter_values, PARAMETER_NAMES};
use std::collections::BTreeSet;

/// One tunable parameter: a name and its ordered list of admissible values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub name: String,
    pub values: Vec<i64>,
}

/// An ordered list of parameters. The total space is the cross product of
/// the value lists; configurations are indexed lexicographically with the
/// first parameter most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpaceDef {
    parameters: Vec<Parameter>,
}

/// One value per parameter, in the parameter order of the space definition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub values: Vec<i64>,
}

impl SearchSpaceDef {
    /// Build a space; parameter names must be unique and every value list
    /// non-empty.
    pub fn new(parameters: Vec<Parameter>) -> Result<Self, String> {
        let mut seen = BTreeSet::new();
        for p in &parameters {
            if !seen.insert(p.name.clone()) {
                return Err(format!("duplicate parameter name {:?}", p.name));
            }
            if p.values.is_empty() {
                return Err(format!("parameter {:?} has an empty value list", p.name));
            }
        }
        Ok(SearchSpaceDef { parameters })
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn dimension_count(&self) -> usize {
        self.parameters.len()
    }

    /// Total number of configurations (product of value-list lengths).
    pub fn size(&self) -> u64 {
        self.parameters
            .iter()
            .fold(1u64, |acc, p| acc.saturating_mul(p.values.len() as u64))
    }

    /// The configuration at a lexicographic index (first parameter most
    /// significant). Panics if `index >= size()`.
    pub fn config_at(&self, index: u64) -> Configuration {
        assert!(index < self.size(), "configuration index out of range");
        let mut values = vec![0i64; self.parameters.len()];
        let mut rest = index;
        for (d, p) in self.parameters.iter().enumerate().rev() {
            let n = p.values.len() as u64;
            values[d] = p.values[(rest % n) as usize];
            rest /= n;
        }
        Configuration { values }
    }

    /// Inverse of [`config_at`]: `None` if any value is not in its list.
    pub fn index_of(&self, config: &Configuration) -> Option<u64> {
        if config.values.len() != self.parameters.len() {
            return None;
        }
        let mut index = 0u64;
        for (d, p) in self.parameters.iter().enumerate() {
            let pos = p.values.iter().position(|&v| v == config.values[d])?;
            index = index * p.values.len() as u64 + pos as u64;
        }
        Some(index)
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        self.index_of(config).is_some()
    }

    /// Per-dimension rank of each value (position in its value list).
    pub fn ranks_of(&self, config: &Configuration) -> Option<Vec<usize>> {
        if config.values.len() != self.parameters.len() {
            return None;
        }
        self.parameters
            .iter()
            .zip(&config.values)
            .map(|(p, v)| p.values.iter().position(|x| x == v))
            .collect()
    }
}

impl Configuration {
    /// Pair each value with its parameter name.
    pub fn named<'a>(&'a self, space: &'a SearchSpaceDef) -> Vec<(&'a str, i64)> {
        space
            .parameters()
            .iter()
            .zip(&self.values)
            .map(|(p, &v)| (p.name.as_str(), v))
            .collect()
    }

    /// Canonical `name=value` form, space separated, in parameter order.
    pub fn to_param_string(&self, space: &SearchSpaceDef) -> String {
        self.named(space)
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The annealing solver's tuning space: its five parameters with their
/// admissible value lists, in canonical order.
pub fn sa_parameter_space() -> SearchSpaceDef {
    let parameters = PARAMETER_NAMES
        .iter()
        .map(|&name| Parameter {
            name: name.to_string(),
            values: parameter_values(name)
                .expect("canonical parameter has a value list")
                .to_vec(),
        })
        .collect();
    SearchSpaceDef::new(parameters).expect("canonical space is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_space_has_the_documented_size() {
        let space = sa_parameter_space();
        assert_eq!(space.dimension_count(), 5);
        assert_eq!(space.size(), 51_200);
    }

    #[test]
    fn index_round_trips_through_config() {
        let space = sa_parameter_space();
        for index in [0u64, 1, 7, 8, 6399, 51_199] {
            let config = space.config_at(index);
            assert_eq!(space.index_of(&config), Some(index));
        }
    }

    #[test]
    fn default_solver_parameters_lie_in_the_space() {
        let space = sa_parameter_space();
        let default = Configuration {
            values: vec![1, 5, 100, 100, 50],
        };
        assert!(space.contains(&default));
    }

    #[test]
    fn foreign_values_are_rejected() {
        let space = sa_parameter_space();
        let off_grid = Configuration {
            values: vec![1, 5, 100, 100, 51],
        };
        assert!(!space.contains(&off_grid));
        assert_eq!(space.index_of(&off_grid), None);
    }

    #[test]
    fn duplicate_names_and_empty_lists_are_rejected() {
        let dup = SearchSpaceDef::new(vec![
            Parameter {
                name: "a".into(),
                values: vec![1],
            },
            Parameter {
                name: "a".into(),
                values: vec![2],
            },
        ]);
        assert!(dup.is_err());
        let empty = SearchSpaceDef::new(vec![Parameter {
            name: "a".into(),
            values: vec![],
        }]);
        assert!(empty.is_err());
    }

    #[test]
    fn param_string_uses_canonical_names() {
        let space = sa_parameter_space();
        let config = space.config_at(0);
        let s = config.to_param_string(&space);
        assert!(s.starts_with("subComponentUnassignedFactor=1 "));
        assert!(s.contains("neighborhoodSize=1"));
    }
}
