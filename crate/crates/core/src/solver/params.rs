//! Solver parameters and their tunable value sets.

use std::collections::BTreeMap;
use thiserror::Error;

/// Tunable parameter names, in canonical order.
pub const PARAMETER_NAMES: [&str; 5] = [
    "subComponentUnassignedFactor",
    "softwareComponentUnassignedFactor",
    "hardScoreStartingTemperature",
    "softScoreStartingTemperature",
    "neighborhoodSize",
];

pub const SUB_FACTOR_VALUES: [i64; 8] = [1, 2, 3, 5, 10, 100, 1000, 10000];
pub const SW_FACTOR_VALUES: [i64; 8] = [1, 2, 3, 5, 10, 100, 1000, 10000];
pub const HARD_TEMP_VALUES: [i64; 10] = [1, 2, 3, 5, 10, 20, 30, 50, 75, 100];
pub const SOFT_TEMP_VALUES: [i64; 10] = [1, 2, 3, 5, 10, 20, 30, 50, 75, 100];
pub const NEIGHBORHOOD_VALUES: [i64; 8] = [1, 2, 5, 10, 20, 30, 40, 50];

/// Value list for one tunable parameter by name.
pub fn parameter_values(name: &str) -> Option<&'static [i64]> {
    match name {
        "subComponentUnassignedFactor" => Some(&SUB_FACTOR_VALUES),
        "softwareComponentUnassignedFactor" => Some(&SW_FACTOR_VALUES),
        "hardScoreStartingTemperature" => Some(&HARD_TEMP_VALUES),
        "softScoreStartingTemperature" => Some(&SOFT_TEMP_VALUES),
        "neighborhoodSize" => Some(&NEIGHBORHOOD_VALUES),
        _ => None,
    }
}

/// Simulated-annealing control parameters.
///
/// The five tunable fields take values from the listed sets when driven by
/// the tuner; `solve` itself accepts any positive values.
#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    /// Hard-score weight of one hardware resource kind over capacity.
    pub sub_component_unassigned_factor: i64,
    /// Hard-score weight of one unsatisfied software slot.
    pub software_component_unassigned_factor: i64,
    /// Percent of the initial hard score used as the hard temperature.
    pub hard_score_starting_temperature: i64,
    /// Percent of the initial soft score used as the soft temperature.
    pub soft_score_starting_temperature: i64,
    /// Candidate moves scored per step (steepest candidate wins).
    pub neighborhood_size: i64,
    pub time_limit_s: f64,
    pub seed: u64,
}

impl Default for SaParams {
    /// The untuned baseline configuration.
    fn default() -> Self {
        SaParams {
            sub_component_unassigned_factor: 1,
            software_component_unassigned_factor: 5,
            hard_score_starting_temperature: 100,
            soft_score_starting_temperature: 100,
            neighborhood_size: 50,
            time_limit_s: 10.0,
            seed: 0,
        }
    }
}

impl SaParams {
    /// Are the five tunable values members of their value sets?
    pub fn in_tuning_space(&self) -> bool {
        SUB_FACTOR_VALUES.contains(&self.sub_component_unassigned_factor)
            && SW_FACTOR_VALUES.contains(&self.software_component_unassigned_factor)
            && HARD_TEMP_VALUES.contains(&self.hard_score_starting_temperature)
            && SOFT_TEMP_VALUES.contains(&self.soft_score_starting_temperature)
            && NEIGHBORHOOD_VALUES.contains(&self.neighborhood_size)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.sub_component_unassigned_factor < 1 || self.software_component_unassigned_factor < 1
        {
            return Err(ParamsError::OutOfRange(
                "unassigned factors must be at least 1".to_string(),
            ));
        }
        if self.hard_score_starting_temperature < 1 || self.soft_score_starting_temperature < 1 {
            return Err(ParamsError::OutOfRange(
                "starting temperatures must be at least 1".to_string(),
            ));
        }
        if self.neighborhood_size < 1 {
            return Err(ParamsError::OutOfRange(
                "neighborhood size must be at least 1".to_string(),
            ));
        }
        if !(self.time_limit_s > 0.0) {
            return Err(ParamsError::OutOfRange(
                "time limit must be positive".to_string(),
            ));
        }
        Ok(())
    }

    /// Build params from named values (the tuner's configuration shape).
    pub fn from_named_values(
        values: &BTreeMap<String, i64>,
        time_limit_s: f64,
        seed: u64,
    ) -> Result<SaParams, ParamsError> {
        let mut params = SaParams {
            time_limit_s,
            seed,
            ..SaParams::default()
        };
        for (name, &value) in values {
            *params.field_mut(name)? = value;
        }
        params.validate()?;
        Ok(params)
    }

    /// The five tunable values, keyed by canonical name.
    pub fn named_values(&self) -> BTreeMap<String, i64> {
        let mut m = BTreeMap::new();
        m.insert(
            "subComponentUnassignedFactor".to_string(),
            self.sub_component_unassigned_factor,
        );
        m.insert(
            "softwareComponentUnassignedFactor".to_string(),
            self.software_component_unassigned_factor,
        );
        m.insert(
            "hardScoreStartingTemperature".to_string(),
            self.hard_score_starting_temperature,
        );
        m.insert(
            "softScoreStartingTemperature".to_string(),
            self.soft_score_starting_temperature,
        );
        m.insert("neighborhoodSize".to_string(), self.neighborhood_size);
        m
    }

    fn field_mut(&mut self, name: &str) -> Result<&mut i64, ParamsError> {
        match name {
            "subComponentUnassignedFactor" => Ok(&mut self.sub_component_unassigned_factor),
            "softwareComponentUnassignedFactor" => {
                Ok(&mut self.software_component_unassigned_factor)
            }
            "hardScoreStartingTemperature" => Ok(&mut self.hard_score_starting_temperature),
            "softScoreStartingTemperature" => Ok(&mut self.soft_score_starting_temperature),
            "neighborhoodSize" => Ok(&mut self.neighborhood_size),
            other => Err(ParamsError::UnknownParameter(other.to_string())),
        }
    }
}

/// Parse `name=value` pairs separated by commas and/or whitespace, e.g.
/// `"neighborhoodSize=20,hardScoreStartingTemperature=50"`.
pub fn parse_named_values(text: &str) -> Result<BTreeMap<String, i64>, ParamsError> {
    let mut out = BTreeMap::new();
    for pair in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
    {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| ParamsError::Malformed(pair.to_string()))?;
        let name = name.trim();
        if parameter_values(name).is_none() {
            return Err(ParamsError::UnknownParameter(name.to_string()));
        }
        let value: i64 = value
            .trim()
            .parse()
            .map_err(|_| ParamsError::Malformed(pair.to_string()))?;
        if out.insert(name.to_string(), value).is_some() {
            return Err(ParamsError::Malformed(format!(
                "duplicate parameter {name}"
            )));
        }
    }
    Ok(out)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("unknown parameter: {0}")]
    UnknownParameter(String),
    #[error("malformed parameter setting: {0}")]
    Malformed(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_untuned_baseline() {
        let p = SaParams::default();
        assert_eq!(p.sub_component_unassigned_factor, 1);
        assert_eq!(p.software_component_unassigned_factor, 5);
        assert_eq!(p.hard_score_starting_temperature, 100);
        assert_eq!(p.soft_score_starting_temperature, 100);
        assert_eq!(p.neighborhood_size, 50);
        assert!(p.in_tuning_space());
    }

    #[test]
    fn named_values_round_trip() {
        let p = SaParams::default();
        let back = SaParams::from_named_values(&p.named_values(), p.time_limit_s, p.seed).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn parse_accepts_commas_and_spaces() {
        let m = parse_named_values("neighborhoodSize=20, hardScoreStartingTemperature=50").unwrap();
        assert_eq!(m["neighborhoodSize"], 20);
        assert_eq!(m["hardScoreStartingTemperature"], 50);
        assert_eq!(parse_named_values("").unwrap().len(), 0);
    }

    #[test]
    fn parse_rejects_unknown_and_malformed() {
        assert!(matches!(
            parse_named_values("bogus=1"),
            Err(ParamsError::UnknownParameter(_))
        ));
        assert!(matches!(
            parse_named_values("neighborhoodSize"),
            Err(ParamsError::Malformed(_))
        ));
        assert!(matches!(
            parse_named_values("neighborhoodSize=abc"),
            Err(ParamsError::Malformed(_))
        ));
        assert!(matches!(
            parse_named_values("neighborhoodSize=1,neighborhoodSize=2"),
            Err(ParamsError::Malformed(_))
        ));
    }

    #[test]
    fn value_sets_have_expected_sizes() {
        assert_eq!(SUB_FACTOR_VALUES.len(), 8);
        assert_eq!(SW_FACTOR_VALUES.len(), 8);
        assert_eq!(HARD_TEMP_VALUES.len(), 10);
        assert_eq!(SOFT_TEMP_VALUES.len(), 10);
        assert_eq!(NEIGHBORHOOD_VALUES.len(), 8);
    }
}
