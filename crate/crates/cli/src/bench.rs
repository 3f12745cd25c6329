//! Benchmark CSV builders: the solver-comparison table, quality-over-time
//! traces, and the first-valid-window scaling sweep. All three are pure
//! functions of their arguments and byte-deterministic under a virtual
//! clock; schemas are documented in `docs/csv-schemas.md`.

use crate::families::{family, Family};
use anyhow::{anyhow, bail, Context, Result};
use qmap_core::ilp::{
    build_ilp_compiled, exact_solve_compiled, predicted_variable_count, ExactError,
};
use qmap_core::model::Compiled;
use qmap_core::solver::{
    quality_ratio, solve_compiled, QualityOutcome, SaParams, Score, SolveResult,
};
use qmap_core::{ClockMode, Scenario};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Marked cell for a failed/absent measurement, as in the comparison table's
/// cross convention.
const MARK_FAIL: &str = "✗";
const MARK_NA: &str = "n/a";
const MARK_INF: &str = "∞";

/// Above this predicted variable count the exact oracle is not attempted
/// (its choice lists grow with the variable count).
const ORACLE_VAR_GATE: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct TableArgs {
    pub families: Vec<String>,
    pub time_limit_s: f64,
    pub seed: u64,
    /// Tuned parameter values; `None` reuses the defaults (columns repeat).
    pub tuned: Option<BTreeMap<String, i64>>,
    pub clock: ClockMode,
    pub oracle_node_budget: u64,
    /// Skip ILP model construction above this predicted variable count.
    pub ilp_var_cap: u64,
}

impl Default for TableArgs {
    fn default() -> Self {
        TableArgs {
            families: crate::families::table_families()
                .iter()
                .map(|f| f.name.to_string())
                .collect(),
            time_limit_s: 10.0,
            seed: 0,
            tuned: None,
            clock: ClockMode::virtual_default(),
            oracle_node_budget: 1_000_000,
            ilp_var_cap: 2_000_000,
        }
    }
}

fn fmt_opt_seconds(v: Option<f64>) -> String {
    match v {
        Some(s) => format!("{s:.3}"),
        None => MARK_FAIL.to_string(),
    }
}

fn fmt_valid(valid: bool) -> &'static str {
    if valid {
        "✓"
    } else {
        MARK_FAIL
    }
}

/// When the annealer never improved on the initial construction, the final
/// best appeared at the first trace event (the construction itself).
fn last_best_at(run: &SolveResult) -> Option<f64> {
    run.trace
        .last_improvement_at
        .or_else(|| run.trace.events.first().map(|e| e.elapsed_s))
}

/// The oracle's answer for one scenario, if it was worth attempting.
fn oracle_optimum(compiled: &Compiled, node_budget: u64) -> Option<Score> {
    if predicted_variable_count(compiled) > ORACLE_VAR_GATE {
        return None;
    }
    match exact_solve_compiled(compiled, node_budget) {
        Ok(solution) if solution.proved_optimal => Some(Score {
            hard: 0,
            soft_micro: solution.objective_micro,
        }),
        Ok(_) | Err(ExactError::BudgetExhausted { .. }) => None,
        Err(_) => None,
    }
}

fn fmt_quality(run: &SolveResult, optimum: Option<Score>) -> String {
    match optimum {
        None => MARK_NA.to_string(),
        Some(opt) => {
            if !run.best_score.is_valid() {
                return MARK_FAIL.to_string();
            }
            if opt.soft_micro == 0 {
                return "1.000".to_string();
            }
            match quality_ratio(run.best_score, opt) {
                QualityOutcome::Ratio(r) => format!("{r:.3}"),
                QualityOutcome::Invalid => MARK_FAIL.to_string(),
            }
        }
    }
}

fn resolve_family(name: &str) -> Result<&'static Family> {
    family(name).ok_or_else(|| {
        anyhow!(
            "unknown scenario family {name:?} (known: {})",
            crate::families::family_names().join(", ")
        )
    })
}

/// Per-family comparison rows: problem size, validity, quality vs the exact
/// oracle, and the timing columns for the default and tuned configurations.
pub fn bench_table(args: &TableArgs) -> Result<String> {
    if args.families.is_empty() {
        bail!("no families selected");
    }
    let default_params = SaParams {
        time_limit_s: args.time_limit_s,
        seed: args.seed,
        ..SaParams::default()
    };
    let tuned_params = match &args.tuned {
        None => None,
        Some(values) => Some(
            SaParams::from_named_values(values, args.time_limit_s, args.seed)
                .context("invalid tuned parameters")?,
        ),
    };

    let mut csv = String::from(
        "family,impls,resources,valid_default,valid_tuned,quality_default,quality_tuned,\
         mh_init_s,ilp_generation_s,first_valid_default_s,first_valid_tuned_s,\
         last_improvement_default_s,last_improvement_tuned_s\n",
    );
    for name in &args.families {
        let preset = resolve_family(name)?;
        let scenario = preset
            .generate(args.seed)
            .with_context(|| format!("generating family {name}"))?;
        let compiled = Compiled::new(&scenario)?;

        let default_run = solve_compiled(&compiled, &default_params, args.clock);
        let tuned_run = tuned_params
            .as_ref()
            .map(|p| solve_compiled(&compiled, p, args.clock));
        let tuned_run = tuned_run.as_ref().unwrap_or(&default_run);

        let ilp_generation = if predicted_variable_count(&compiled) > args.ilp_var_cap {
            MARK_FAIL.to_string()
        } else {
            let (_, seconds) = build_ilp_compiled(&compiled, args.clock);
            format!("{seconds:.3}")
        };
        let optimum = oracle_optimum(&compiled, args.oracle_node_budget);

        writeln!(
            csv,
            "{},{},{},{},{},{},{},{:.3},{},{},{},{},{}",
            name,
            scenario.implementations.len(),
            scenario.hardware.len(),
            fmt_valid(default_run.best_score.is_valid()),
            fmt_valid(tuned_run.best_score.is_valid()),
            fmt_quality(&default_run, optimum),
            fmt_quality(tuned_run, optimum),
            default_run.init_seconds,
            ilp_generation,
            fmt_opt_seconds(default_run.trace.first_valid_at),
            fmt_opt_seconds(tuned_run.trace.first_valid_at),
            fmt_opt_seconds(last_best_at(&default_run)),
            fmt_opt_seconds(last_best_at(tuned_run)),
        )?;
    }
    Ok(csv)
}

#[derive(Debug, Clone)]
pub struct TraceArgs {
    pub params: SaParams,
    pub clock: ClockMode,
    pub oracle_node_budget: u64,
}

/// Quality-over-time trace of one solve. Validity is normalized against the
/// starting solution's hard score (1 = valid); quality is 0 until the first
/// valid solution, then optimal/current. Without an oracle optimum the
/// third column reports the raw soft score instead.
pub fn bench_trace(scenario: &Scenario, args: &TraceArgs) -> Result<String> {
    let compiled = Compiled::new(scenario)?;
    let run = solve_compiled(&compiled, &args.params, args.clock);
    let optimum = oracle_optimum(&compiled, args.oracle_node_budget);

    let initial_hard = run.trace.events.first().map(|e| e.score.hard).unwrap_or(0);
    let normalized = |hard: i64| -> f64 {
        if initial_hard == 0 {
            1.0
        } else {
            (1.0 - hard as f64 / initial_hard as f64).clamp(0.0, 1.0)
        }
    };

    let mut csv = String::new();
    match optimum {
        Some(opt) => {
            csv.push_str("elapsed_s,normalized_validity,quality_ratio\n");
            for event in &run.trace.events {
                let quality = if !event.valid || event.score.soft_micro == 0 {
                    0.0
                } else {
                    opt.soft_micro as f64 / event.score.soft_micro as f64
                };
                writeln!(
                    csv,
                    "{:.3},{:.4},{:.6}",
                    event.elapsed_s,
                    normalized(event.score.hard),
                    quality
                )?;
            }
        }
        None => {
            csv.push_str("elapsed_s,normalized_validity,soft\n");
            for event in &run.trace.events {
                writeln!(
                    csv,
                    "{:.3},{:.4},{:.6}",
                    event.elapsed_s,
                    normalized(event.score.hard),
                    event.score.soft()
                )?;
            }
        }
    }
    Ok(csv)
}

#[derive(Debug, Clone)]
pub struct ScalingArgs {
    pub hwc_counts: Vec<usize>,
    pub params: SaParams,
    pub seed: u64,
    pub clock: ClockMode,
}

/// First-valid-window sweep on the chain family: per hardware count, the
/// heuristic's first-valid time against the ILP model's generation time and
/// size. The window is the head start the heuristic has before the ILP
/// model even exists.
pub fn bench_scaling(args: &ScalingArgs) -> Result<String> {
    if args.hwc_counts.is_empty() {
        bail!("no hardware counts given");
    }
    if args.hwc_counts.windows(2).any(|w| w[0] >= w[1]) {
        bail!("hardware counts must be strictly ascending");
    }
    let preset = resolve_family("chain4")?;

    let mut csv =
        String::from("hwc,ilp_vars,mh_init_s,mh_first_valid_s,ilp_generation_s,window_s\n");
    for &count in &args.hwc_counts {
        let scenario = preset
            .generate_scaled(count as f64, args.seed)
            .with_context(|| format!("generating chain4 at {count} hardware components"))?;
        let compiled = Compiled::new(&scenario)?;
        let run = solve_compiled(&compiled, &args.params, args.clock);
        let (model, generation_s) = build_ilp_compiled(&compiled, args.clock);

        let (first_valid, window) = match run.trace.first_valid_at {
            Some(t) => (format!("{t:.3}"), format!("{:.3}", generation_s - t)),
            None => (MARK_INF.to_string(), MARK_NA.to_string()),
        };
        writeln!(
            csv,
            "{},{},{:.3},{},{:.3},{}",
            count,
            model.variable_count(),
            run.init_seconds,
            first_valid,
            generation_s,
            window
        )?;
    }
    Ok(csv)
}
