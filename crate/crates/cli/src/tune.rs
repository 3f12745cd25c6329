//! The tuning benchmark: run a full experiment over the five solver
//! parameters, then evaluate the winner against the default configuration
//! at the production time limit across several seeds.

use anyhow::{Context, Result};
use qmap_core::model::scenario_to_string;
use qmap_core::solver::{solve_with_clock, SaParams};
use qmap_core::{ClockMode, Scenario};
use qmap_orchestrator::CoordinatorEvaluator;
use qmap_tuner::{run_experiment, sa_parameter_space, ExperimentOutcome, TunerSettings};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct TuneArgs {
    pub settings: TunerSettings,
    /// Solve-time limit for the final default-vs-tuned comparison.
    pub production_time_limit_s: f64,
    /// Seeds per configuration in the final comparison.
    pub comparison_seeds: u32,
    pub clock: ClockMode,
}

#[derive(Debug, Clone)]
pub struct TuneOutput {
    pub outcome: ExperimentOutcome,
    pub tuned: BTreeMap<String, i64>,
    pub default: BTreeMap<String, i64>,
    /// The configuration to ship: the experiment winner if it also wins the
    /// production-limit validation, otherwise the default. Tuning therefore
    /// never recommends a configuration that measured worse than the
    /// default under production conditions.
    pub recommended: BTreeMap<String, i64>,
    /// Side-by-side comparison CSV at the production time limit.
    pub comparison_csv: String,
    pub median_default_soft: f64,
    pub median_tuned_soft: f64,
    /// The recommended configuration's median from the same comparison.
    pub median_recommended_soft: f64,
}

/// Median of the given values; invalid runs enter as +∞ so a configuration
/// that fails on most seeds cannot look good.
fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN scores"));
    let n = values.len();
    if n == 0 {
        return f64::INFINITY;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn comparison_rows(
    csv: &mut String,
    label: &str,
    scenario: &Scenario,
    values: &BTreeMap<String, i64>,
    args: &TuneArgs,
) -> Result<Vec<f64>> {
    let mut softs = Vec::new();
    for k in 0..args.comparison_seeds {
        let seed = args.settings.seed ^ (0x9e3779b9 + u64::from(k));
        let params = SaParams::from_named_values(values, args.production_time_limit_s, seed)?;
        let run = solve_with_clock(scenario, &params, args.clock)?;
        let valid = run.best_score.is_valid();
        let soft = if valid {
            run.best_score.soft()
        } else {
            f64::INFINITY
        };
        softs.push(soft);
        writeln!(
            csv,
            "{},{},{},{},{}",
            label,
            seed,
            valid,
            if valid {
                format!("{:.6}", run.best_score.soft())
            } else {
                "inf".to_string()
            },
            match run.trace.first_valid_at {
                Some(t) => format!("{t:.3}"),
                None => "∞".to_string(),
            }
        )?;
    }
    Ok(softs)
}

/// Run the experiment (through the coordinator-backed single-worker pool)
/// and produce the report plus the default-vs-tuned comparison.
pub fn bench_tune(scenario: &Scenario, args: &TuneArgs) -> Result<TuneOutput> {
    let space = sa_parameter_space();
    let mut evaluator =
        CoordinatorEvaluator::new(scenario_to_string(scenario), args.settings.seed, args.clock);
    let outcome = run_experiment(&args.settings, &space, &mut evaluator, args.clock)
        .context("tuning experiment failed")?;

    let tuned = outcome.best.named(&space);
    let tuned: BTreeMap<String, i64> = tuned.into_iter().map(|(n, v)| (n.to_string(), v)).collect();
    let default = args
        .settings
        .default_config
        .clone()
        .unwrap_or_else(|| SaParams::default().named_values());

    let mut csv = String::from("configuration,seed,valid,soft,first_valid_s\n");
    let default_softs = comparison_rows(&mut csv, "default", scenario, &default, args)?;
    let tuned_softs = comparison_rows(&mut csv, "tuned", scenario, &tuned, args)?;
    let median_default_soft = median(default_softs);
    let median_tuned_soft = median(tuned_softs);
    // Validation gate: only switch away from the default when the winner
    // also holds up under production conditions (ties keep the default).
    let (recommended, median_recommended_soft) = if median_tuned_soft < median_default_soft {
        (tuned.clone(), median_tuned_soft)
    } else {
        (default.clone(), median_default_soft)
    };
    writeln!(
        csv,
        "# production_time_limit_s: {:.3}",
        args.production_time_limit_s
    )?;
    writeln!(csv, "# median_default_soft: {median_default_soft:.6}")?;
    writeln!(csv, "# median_tuned_soft: {median_tuned_soft:.6}")?;
    writeln!(
        csv,
        "# recommended: {}",
        if recommended == default {
            "default"
        } else {
            "tuned"
        }
    )?;

    Ok(TuneOutput {
        outcome,
        tuned,
        default,
        recommended,
        comparison_csv: csv,
        median_default_soft,
        median_tuned_soft,
        median_recommended_soft,
    })
}
