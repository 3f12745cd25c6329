//! Parameter tuning as a configurable product line.
//!
//! An experiment walks a discrete search space: a sampler (random or Sobol)
//! explores until a regression surrogate over the measurements validates,
//! after which the model proposes candidates; a repeater decides how often
//! each configuration is re-evaluated; composable stop conditions end the
//! run. Everything is deterministic given the settings seed and a
//! deterministic evaluator.

pub mod experiment;
pub mod repeater;
pub mod settings;
pub mod sobol;
pub mod space;
pub mod stop;
pub mod surrogate;

pub use experiment::{
    derive_eval_seed, objective, run_experiment, EvalSample, Evaluator, ExperimentOutcome,
    Measurement, Selection, TunerError, TunerSettings,
};
pub use repeater::{repeater_decide, RepeatDecision, Repeater};
pub use settings::{
    load_settings, parse_settings_str, save_settings, settings_to_string, standard_settings,
    SETTINGS_VERSION,
};
pub use sobol::{sobol_config, sobol_point};
pub use space::{sa_parameter_space, Configuration, Parameter, SearchSpaceDef};
pub use stop::{evaluate_stop, StopCondition, StopRule, StopStatus};
pub use surrogate::{fit_and_validate, suggest_next, ModelVariant, Surrogate};
