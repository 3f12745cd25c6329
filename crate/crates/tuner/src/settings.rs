//! Settings file for tuning experiments: names the feature variants and
//! their numeric arguments.

use crate::experiment::{Selection, TunerError, TunerSettings};
use crate::repeater::Repeater;
use crate::stop::{StopCondition, StopRule};
use crate::surrogate::ModelVariant;
use qmap_core::solver::SaParams;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const SETTINGS_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
struct VersionProbe {
    version: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SettingsFile {
    version: u32,
    seed: u64,
    per_eval_time_limit_s: f64,
    selection: String,
    model: String,
    repeater: RepeaterDto,
    stop: Vec<StopDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_config: Option<BTreeMap<String, i64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RepeaterDto {
    variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_reps: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rel_ci: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relax_factor: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct StopDto {
    variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<String>,
}

fn missing(field: &str, variant: &str) -> TunerError {
    TunerError::Parse(format!("{variant:?} requires field {field:?}"))
}

fn settings_from_file(file: SettingsFile) -> Result<TunerSettings, TunerError> {
    let selection = match file.selection.as_str() {
        "random" => Selection::Random,
        "sobol" => Selection::Sobol,
        other => {
            return Err(TunerError::Parse(format!(
                "unknown selection variant {other:?} (expected random|sobol)"
            )))
        }
    };
    let model = match file.model.as_str() {
        "regression" => ModelVariant::Regression,
        "bayesian" => ModelVariant::Bayesian,
        "combined" => ModelVariant::Combined,
        other => {
            return Err(TunerError::Parse(format!(
                "unknown model variant {other:?} (expected regression|bayesian|combined)"
            )))
        }
    };
    let repeater = match file.repeater.variant.as_str() {
        "quantity" => Repeater::Quantity {
            k: file.repeater.k.ok_or_else(|| missing("k", "quantity"))?,
        },
        "student" => Repeater::Student {
            max_reps: file
                .repeater
                .max_reps
                .ok_or_else(|| missing("maxReps", "student"))?,
            rel_ci: file
                .repeater
                .rel_ci
                .ok_or_else(|| missing("relCi", "student"))?,
        },
        "modelAwareStudent" => Repeater::ModelAwareStudent {
            max_reps: file
                .repeater
                .max_reps
                .ok_or_else(|| missing("maxReps", "modelAwareStudent"))?,
            rel_ci: file
                .repeater
                .rel_ci
                .ok_or_else(|| missing("relCi", "modelAwareStudent"))?,
            relax_factor: file
                .repeater
                .relax_factor
                .ok_or_else(|| missing("relaxFactor", "modelAwareStudent"))?,
        },
        other => {
            return Err(TunerError::Parse(format!(
                "unknown repeater variant {other:?} (expected quantity|student|modelAwareStudent)"
            )))
        }
    };
    let mut stop = Vec::with_capacity(file.stop.len());
    for dto in &file.stop {
        let condition = match dto.variant.as_str() {
            "quantity" => StopCondition::Quantity(dto.n.ok_or_else(|| missing("n", "quantity"))?),
            "adaptive" => StopCondition::Adaptive(
                dto.fraction
                    .ok_or_else(|| missing("fraction", "adaptive"))?,
            ),
            "time" => StopCondition::Time(dto.seconds.ok_or_else(|| missing("seconds", "time"))?),
            "improvement" => {
                StopCondition::Improvement(dto.n.ok_or_else(|| missing("n", "improvement"))?)
            }
            "guaranteed" => StopCondition::Guaranteed,
            other => {
                return Err(TunerError::Parse(format!(
                    "unknown stop variant {other:?} \
                     (expected quantity|adaptive|time|improvement|guaranteed)"
                )))
            }
        };
        let mandatory = match dto.group.as_deref() {
            None | Some("any") => false,
            Some("mandatory") => true,
            Some(other) => {
                return Err(TunerError::Parse(format!(
                    "unknown stop group {other:?} (expected any|mandatory)"
                )))
            }
        };
        stop.push(StopRule {
            condition,
            mandatory,
        });
    }
    let settings = TunerSettings {
        selection,
        model,
        repeater,
        stop,
        per_eval_time_limit_s: file.per_eval_time_limit_s,
        seed: file.seed,
        default_config: file.default_config,
    };
    settings.validate()?;
    Ok(settings)
}

fn settings_to_file(settings: &TunerSettings) -> SettingsFile {
    let repeater = match settings.repeater {
        Repeater::Quantity { k } => RepeaterDto {
            variant: "quantity".into(),
            k: Some(k),
            max_reps: None,
            rel_ci: None,
            relax_factor: None,
        },
        Repeater::Student { max_reps, rel_ci } => RepeaterDto {
            variant: "student".into(),
            k: None,
            max_reps: Some(max_reps),
            rel_ci: Some(rel_ci),
            relax_factor: None,
        },
        Repeater::ModelAwareStudent {
            max_reps,
            rel_ci,
            relax_factor,
        } => RepeaterDto {
            variant: "modelAwareStudent".into(),
            k: None,
            max_reps: Some(max_reps),
            rel_ci: Some(rel_ci),
            relax_factor: Some(relax_factor),
        },
    };
    let stop = settings
        .stop
        .iter()
        .map(|rule| {
            let (variant, n, fraction, seconds) = match rule.condition {
                StopCondition::Quantity(n) => ("quantity", Some(n), None, None),
                StopCondition::Adaptive(f) => ("adaptive", None, Some(f), None),
                StopCondition::Time(s) => ("time", None, None, Some(s)),
                StopCondition::Improvement(n) => ("improvement", Some(n), None, None),
                StopCondition::Guaranteed => ("guaranteed", None, None, None),
            };
            StopDto {
                variant: variant.into(),
                n,
                fraction,
                seconds,
                group: rule.mandatory.then(|| "mandatory".to_string()),
            }
        })
        .collect();
    SettingsFile {
        version: SETTINGS_VERSION,
        seed: settings.seed,
        per_eval_time_limit_s: settings.per_eval_time_limit_s,
        selection: match settings.selection {
            Selection::Random => "random".into(),
            Selection::Sobol => "sobol".into(),
        },
        model: match settings.model {
            ModelVariant::Regression => "regression".into(),
            ModelVariant::Bayesian => "bayesian".into(),
            ModelVariant::Combined => "combined".into(),
        },
        repeater,
        stop,
        default_config: settings.default_config.clone(),
    }
}

pub fn parse_settings_str(text: &str) -> Result<TunerSettings, TunerError> {
    let probe: VersionProbe = toml::from_str(text).map_err(|e| TunerError::Parse(e.to_string()))?;
    match probe.version {
        None => {
            return Err(TunerError::Parse(
                "settings file misses the `version` field".into(),
            ))
        }
        Some(SETTINGS_VERSION) => {}
        Some(found) => {
            return Err(TunerError::UnsupportedVersion {
                found,
                supported: SETTINGS_VERSION,
            })
        }
    }
    let file: SettingsFile = toml::from_str(text).map_err(|e| TunerError::Parse(e.to_string()))?;
    settings_from_file(file)
}

pub fn settings_to_string(settings: &TunerSettings) -> Result<String, TunerError> {
    toml::to_string(&settings_to_file(settings)).map_err(|e| TunerError::Parse(e.to_string()))
}

pub fn load_settings(path: &Path) -> Result<TunerSettings, TunerError> {
    parse_settings_str(&std::fs::read_to_string(path)?)
}

pub fn save_settings(settings: &TunerSettings, path: &Path) -> Result<(), TunerError> {
    Ok(std::fs::write(path, settings_to_string(settings)?)?)
}

/// The standard tuning recipe: Sobol sampling into a combined model, two
/// repetitions per configuration, stop after 50 configurations without
/// improvement, 10-second evaluations, and the solver's default parameters
/// measured first as the baseline.
pub fn standard_settings(seed: u64) -> TunerSettings {
    let default_config = SaParams::default().named_values();
    TunerSettings {
        selection: Selection::Sobol,
        model: ModelVariant::Combined,
        repeater: Repeater::Quantity { k: 2 },
        stop: vec![StopRule {
            condition: StopCondition::Improvement(50),
            mandatory: false,
        }],
        per_eval_time_limit_s: 10.0,
        seed,
        default_config: Some(default_config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_round_trip_byte_identically() {
        let settings = standard_settings(42);
        let text = settings_to_string(&settings).unwrap();
        let parsed = parse_settings_str(&text).unwrap();
        assert_eq!(parsed, settings);
        let again = settings_to_string(&parsed).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn all_variants_survive_a_round_trip() {
        let mut settings = standard_settings(1);
        settings.selection = Selection::Random;
        settings.model = ModelVariant::Bayesian;
        settings.repeater = Repeater::ModelAwareStudent {
            max_reps: 10,
            rel_ci: 0.05,
            relax_factor: 2.0,
        };
        settings.stop = vec![
            StopRule {
                condition: StopCondition::Guaranteed,
                mandatory: true,
            },
            StopRule {
                condition: StopCondition::Adaptive(0.25),
                mandatory: false,
            },
            StopRule {
                condition: StopCondition::Time(600.0),
                mandatory: false,
            },
        ];
        let text = settings_to_string(&settings).unwrap();
        assert_eq!(parse_settings_str(&text).unwrap(), settings);
    }

    #[test]
    fn missing_version_is_rejected() {
        let err = parse_settings_str("seed = 1").unwrap_err();
        assert!(matches!(err, TunerError::Parse(_)), "{err}");
    }

    #[test]
    fn future_version_is_rejected_with_both_versions_named() {
        let text = settings_to_string(&standard_settings(1))
            .unwrap()
            .replace("version = 1", "version = 9");
        match parse_settings_str(&text) {
            Err(TunerError::UnsupportedVersion {
                found: 9,
                supported: 1,
            }) => {}
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_variants_are_rejected() {
        let text = "bogus = 3\n".to_string() + &settings_to_string(&standard_settings(1)).unwrap();
        assert!(parse_settings_str(&text).is_err());
        let text = settings_to_string(&standard_settings(1))
            .unwrap()
            .replace("selection = \"sobol\"", "selection = \"fedorov\"");
        assert!(matches!(
            parse_settings_str(&text),
            Err(TunerError::Parse(_))
        ));
    }

    #[test]
    fn repeater_arguments_are_required() {
        let text = r#"
version = 1
seed = 1
perEvalTimeLimitS = 10.0
selection = "sobol"
model = "combined"

[repeater]
variant = "student"
maxReps = 5

[[stop]]
variant = "improvement"
n = 50
"#;
        let err = parse_settings_str(text).unwrap_err();
        assert!(err.to_string().contains("relCi"), "{err}");
    }

    #[test]
    fn files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tuning.toml");
        let settings = standard_settings(5);
        save_settings(&settings, &path).unwrap();
        assert_eq!(load_settings(&path).unwrap(), settings);
    }
}
