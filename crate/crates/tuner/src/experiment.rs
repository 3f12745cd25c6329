//! The experiment loop: selection, measurement with repetition control,
//! model refitting, and stop-condition evaluation.

use crate::repeater::{repeater_decide, RepeatDecision, Repeater};
use crate::sobol::sobol_config;
use crate::space::{Configuration, SearchSpaceDef};
use crate::stop::{evaluate_stop, validate_rules, StopRule, StopStatus};
use crate::surrogate::{fit_and_validate, suggest_next, ModelVariant, Surrogate};
use qmap_core::ClockMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

/// One evaluation of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSample {
    pub valid: bool,
    /// Final soft score (energy); meaningful only when `valid`.
    pub soft: f64,
    /// Seconds until the first valid solution, if one was found.
    pub first_valid_at: Option<f64>,
    /// Time the evaluation consumed (drives the virtual experiment clock).
    pub seconds: f64,
}

/// Maps a configuration to objective samples — typically by running the
/// annealing solver with the configuration's parameters.
pub trait Evaluator {
    fn evaluate(
        &mut self,
        space: &SearchSpaceDef,
        config: &Configuration,
        repetition: u32,
        time_limit_s: f64,
    ) -> Result<EvalSample, String>;
}

/// Invalid-dominated scalar objective: +∞ when no repetition produced a
/// valid solution, otherwise the mean soft score over the valid ones
/// (lower is better).
pub fn objective(samples: &[EvalSample]) -> f64 {
    let valid: Vec<f64> = samples.iter().filter(|s| s.valid).map(|s| s.soft).collect();
    if valid.is_empty() {
        f64::INFINITY
    } else {
        valid.iter().sum::<f64>() / valid.len() as f64
    }
}

/// A measured configuration with its aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub values: Vec<i64>,
    pub samples: Vec<EvalSample>,
    /// Aggregate objective (recomputed from the samples).
    pub objective: f64,
    /// Sample standard deviation over the valid repetitions.
    pub sample_std: f64,
    /// Experiment time when the measurement completed.
    pub completed_at_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Random,
    Sobol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunerSettings {
    pub selection: Selection,
    pub model: ModelVariant,
    pub repeater: Repeater,
    pub stop: Vec<StopRule>,
    pub per_eval_time_limit_s: f64,
    pub seed: u64,
    /// Measured first when present, giving the `Guaranteed` stop condition
    /// its baseline and reports their default-vs-tuned comparison.
    pub default_config: Option<BTreeMap<String, i64>>,
}

impl TunerSettings {
    pub fn validate(&self) -> Result<(), TunerError> {
        validate_rules(&self.stop).map_err(TunerError::InvalidSettings)?;
        self.repeater
            .validate()
            .map_err(TunerError::InvalidSettings)?;
        if !(self.per_eval_time_limit_s > 0.0) {
            return Err(TunerError::InvalidSettings(
                "perEvalTimeLimitS must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Resolve the named default configuration against the space.
    pub fn resolved_default(
        &self,
        space: &SearchSpaceDef,
    ) -> Result<Option<Configuration>, TunerError> {
        let Some(named) = &self.default_config else {
            return Ok(None);
        };
        for name in named.keys() {
            if !space.parameters().iter().any(|p| &p.name == name) {
                return Err(TunerError::UnknownParameter(name.clone()));
            }
        }
        let mut values = Vec::with_capacity(space.dimension_count());
        for p in space.parameters() {
            let v = *named.get(&p.name).ok_or_else(|| {
                TunerError::InvalidSettings(format!(
                    "default configuration misses parameter {:?}",
                    p.name
                ))
            })?;
            if !p.values.contains(&v) {
                return Err(TunerError::ValueNotInSpace {
                    name: p.name.clone(),
                    value: v,
                });
            }
            values.push(v);
        }
        Ok(Some(Configuration { values }))
    }
}

#[derive(Debug, Error)]
pub enum TunerError {
    #[error("invalid tuner settings: {0}")]
    InvalidSettings(String),
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
    #[error("value {value} for parameter {name:?} is not in the search space")]
    ValueNotInSpace { name: String, value: i64 },
    #[error("settings parse error: {0}")]
    Parse(String),
    #[error("unsupported settings version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Result of a tuning run: the full measurement log in visit order plus the
/// incumbent and a CSV report.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub best: Configuration,
    pub best_objective: f64,
    pub stop_reason: String,
    pub measurements: Vec<Measurement>,
    pub default_objective: Option<f64>,
    pub model_validated_after: Option<usize>,
    pub total_evaluations: usize,
    pub elapsed_s: f64,
    pub report_csv: String,
}

/// Deterministic per-evaluation seed: folds the experiment seed, the
/// canonical parameter string, and the repetition index through FNV-1a.
pub fn derive_eval_seed(base_seed: u64, param_string: &str, repetition: u32) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let eat = |h: &mut u64, bytes: &[u8]| {
        for &b in bytes {
            *h ^= b as u64;
            *h = h.wrapping_mul(PRIME);
        }
    };
    eat(&mut h, &base_seed.to_le_bytes());
    eat(&mut h, param_string.as_bytes());
    eat(&mut h, &repetition.to_le_bytes());
    h
}

/// Experiment time source: wall time, or the accumulated durations reported
/// by the evaluations when running virtually.
enum ExperimentClock {
    Wall(Instant),
    Virtual(f64),
}

impl ExperimentClock {
    fn start(mode: ClockMode) -> Self {
        match mode {
            ClockMode::Wall => ExperimentClock::Wall(Instant::now()),
            ClockMode::Virtual { .. } => ExperimentClock::Virtual(0.0),
        }
    }

    fn advance(&mut self, seconds: f64) {
        if let ExperimentClock::Virtual(t) = self {
            *t += seconds;
        }
    }

    fn elapsed(&self) -> f64 {
        match self {
            ExperimentClock::Wall(start) => start.elapsed().as_secs_f64(),
            ExperimentClock::Virtual(t) => *t,
        }
    }
}

struct ExperimentState {
    measured: BTreeMap<Vec<i64>, f64>,
    order: Vec<Measurement>,
    best: Option<(Vec<i64>, f64)>,
    configs_since_improvement: usize,
    default_objective: Option<f64>,
    surrogate: Option<Surrogate>,
    model_validated_after: Option<usize>,
    sobol_cursor: u64,
}

/// Run a tuning experiment: select configurations (sampler until the model
/// validates, then model suggestions), measure each with the repeater,
/// and stop per the composed conditions. Deterministic given the settings
/// seed and a deterministic evaluator (sequential mode).
pub fn run_experiment(
    settings: &TunerSettings,
    space: &SearchSpaceDef,
    evaluator: &mut dyn Evaluator,
    clock_mode: ClockMode,
) -> Result<ExperimentOutcome, TunerError> {
    settings.validate()?;
    let default = settings.resolved_default(space)?;
    let mut clock = ExperimentClock::start(clock_mode);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut state = ExperimentState {
        measured: BTreeMap::new(),
        order: Vec::new(),
        best: None,
        configs_since_improvement: 0,
        default_objective: None,
        surrogate: None,
        model_validated_after: None,
        sobol_cursor: 1,
    };

    let stop_reason;
    let mut pending_default = default;
    loop {
        let config = if let Some(d) = pending_default.take() {
            Some(d)
        } else {
            select_next(settings, space, &mut state, &mut rng)
        };
        let Some(config) = config else {
            stop_reason = "space exhausted".to_string();
            break;
        };
        let is_default = state.order.is_empty()
            && state.default_objective.is_none()
            && settings.default_config.is_some();

        let measurement = measure(settings, space, &config, evaluator, &mut clock, &state);
        let obj = measurement.objective;
        if is_default {
            state.default_objective = Some(obj);
        }
        let improved =
            obj.is_finite() && state.best.as_ref().map(|(_, b)| obj < *b).unwrap_or(true);
        if improved {
            state.best = Some((config.values.clone(), obj));
            state.configs_since_improvement = 0;
        } else {
            state.configs_since_improvement += 1;
        }
        state.measured.insert(config.values.clone(), obj);
        state.order.push(measurement);

        refit_model(settings, space, &mut state);

        let status = StopStatus {
            measured_count: state.measured.len(),
            space_size: space.size(),
            elapsed_s: clock.elapsed(),
            configs_since_improvement: state.configs_since_improvement,
            best_objective: state.best.as_ref().map(|(_, o)| *o),
            default_objective: state.default_objective,
        };
        if let Some(reason) = evaluate_stop(&settings.stop, &status) {
            stop_reason = reason;
            break;
        }
    }

    // Incumbent: the best finite aggregate, else the first measurement.
    let best_values = state
        .best
        .as_ref()
        .map(|(v, _)| v.clone())
        .or_else(|| state.order.first().map(|m| m.values.clone()))
        .ok_or_else(|| TunerError::InvalidSettings("empty search space".into()))?;
    let best_objective = state
        .best
        .as_ref()
        .map(|(_, o)| *o)
        .unwrap_or(f64::INFINITY);
    let best = Configuration {
        values: best_values,
    };
    let total_evaluations: usize = state.order.iter().map(|m| m.samples.len()).sum();
    let elapsed_s = clock.elapsed();
    let report_csv = render_report(
        space,
        &state.order,
        &best,
        best_objective,
        &stop_reason,
        total_evaluations,
        state.model_validated_after,
        elapsed_s,
    );

    Ok(ExperimentOutcome {
        best,
        best_objective,
        stop_reason,
        measurements: state.order,
        default_objective: state.default_objective,
        model_validated_after: state.model_validated_after,
        total_evaluations,
        elapsed_s,
        report_csv,
    })
}

fn measure(
    settings: &TunerSettings,
    space: &SearchSpaceDef,
    config: &Configuration,
    evaluator: &mut dyn Evaluator,
    clock: &mut ExperimentClock,
    state: &ExperimentState,
) -> Measurement {
    // A validated model downgrades precision for predicted losers.
    let predicted_worse = match (&state.surrogate, &state.best) {
        (Some(model), Some((_, best_obj))) => model.predict(space, config) > *best_obj,
        _ => false,
    };
    let mut samples: Vec<EvalSample> = Vec::new();
    let mut repetition = 0u32;
    loop {
        match evaluator.evaluate(space, config, repetition, settings.per_eval_time_limit_s) {
            Ok(sample) => {
                clock.advance(sample.seconds);
                samples.push(sample);
            }
            Err(_) => {
                // Failed evaluation: keep the configuration in the measured
                // set with a worst-case sample so it is never resampled.
                samples.push(EvalSample {
                    valid: false,
                    soft: f64::INFINITY,
                    first_valid_at: None,
                    seconds: 0.0,
                });
                break;
            }
        }
        repetition += 1;
        let valid: Vec<f64> = samples.iter().filter(|s| s.valid).map(|s| s.soft).collect();
        let decision = repeater_decide(&settings.repeater, samples.len(), &valid, predicted_worse);
        if decision == RepeatDecision::Stop {
            break;
        }
    }
    let obj = objective(&samples);
    let valid: Vec<f64> = samples.iter().filter(|s| s.valid).map(|s| s.soft).collect();
    let sample_std = if valid.len() >= 2 {
        let mean = valid.iter().sum::<f64>() / valid.len() as f64;
        (valid.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (valid.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    Measurement {
        values: config.values.clone(),
        samples,
        objective: obj,
        sample_std,
        completed_at_s: clock.elapsed(),
    }
}

fn refit_model(settings: &TunerSettings, space: &SearchSpaceDef, state: &mut ExperimentState) {
    let samples: Vec<(Vec<i64>, f64)> = state
        .measured
        .iter()
        .map(|(v, &o)| (v.clone(), o))
        .collect();
    if let Some(model) = fit_and_validate(space, &samples, settings.seed) {
        if state.model_validated_after.is_none() {
            state.model_validated_after = Some(state.order.len());
        }
        state.surrogate = Some(model);
    }
}

/// Pick the next unmeasured configuration: model suggestion once validated,
/// otherwise the configured sampler. Skips measured configurations; after too
/// many consecutive hits the lexicographically first unmeasured configuration
/// is taken, which also detects exhaustion.
fn select_next(
    settings: &TunerSettings,
    space: &SearchSpaceDef,
    state: &mut ExperimentState,
    rng: &mut ChaCha8Rng,
) -> Option<Configuration> {
    if state.measured.len() as u64 >= space.size() {
        return None;
    }
    if let Some(model) = &state.surrogate {
        return suggest_next(space, settings.model, model, &state.measured);
    }
    let attempts_cap = 4 * space.size() + 64;
    match settings.selection {
        Selection::Random => {
            for _ in 0..attempts_cap {
                let config = space.config_at(rng.gen_range(0..space.size()));
                if !state.measured.contains_key(&config.values) {
                    return Some(config);
                }
            }
        }
        Selection::Sobol => {
            for _ in 0..attempts_cap {
                if state.sobol_cursor >= u32::MAX as u64 {
                    break;
                }
                let config = sobol_config(space, state.sobol_cursor);
                state.sobol_cursor += 1;
                if !state.measured.contains_key(&config.values) {
                    return Some(config);
                }
            }
        }
    }
    // Fallback scan in index order.
    (0..space.size())
        .map(|i| space.config_at(i))
        .find(|c| !state.measured.contains_key(&c.values))
}

#[allow(clippy::too_many_arguments)]
fn render_report(
    space: &SearchSpaceDef,
    measurements: &[Measurement],
    best: &Configuration,
    best_objective: f64,
    stop_reason: &str,
    total_evaluations: usize,
    model_validated_after: Option<usize>,
    elapsed_s: f64,
) -> String {
    let mut out = String::new();
    let names: Vec<&str> = space.parameters().iter().map(|p| p.name.as_str()).collect();
    out.push_str("iteration,");
    out.push_str(&names.join(","));
    out.push_str(",repetitions,mean_objective,valid,elapsed_s\n");
    for (i, m) in measurements.iter().enumerate() {
        let values: Vec<String> = m.values.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{:.6},{},{:.3}\n",
            i + 1,
            values.join(","),
            m.samples.len(),
            m.objective,
            m.objective.is_finite(),
            m.completed_at_s,
        ));
    }
    out.push_str(&format!("# best: {}\n", best.to_param_string(space)));
    out.push_str(&format!("# best_objective: {best_objective:.6}\n"));
    out.push_str(&format!("# stop_reason: {stop_reason}\n"));
    out.push_str(&format!("# configurations: {}\n", measurements.len()));
    out.push_str(&format!("# evaluations: {total_evaluations}\n"));
    out.push_str(&format!(
        "# model_validated_after: {}\n",
        model_validated_after.map_or("never".to_string(), |n| n.to_string())
    ));
    out.push_str(&format!("# elapsed_s: {elapsed_s:.3}\n"));
    out
}
