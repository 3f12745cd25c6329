//! `qmap`: scenario generation, solving, ILP export, benchmark CSVs,
//! parameter tuning, and distributed main-node/worker execution.
//!
//! Every failure exits nonzero after printing one machine-readable JSON
//! error line to stderr: `{"error":"..."}`.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use qmap_cli::{bench, families, tune};
use qmap_core::ilp::{build_ilp_with_clock, export_lp_string};
use qmap_core::model::{load_scenario, save_scenario, Scenario};
use qmap_core::solver::{parse_named_values, solve_with_clock, SaParams};
use qmap_core::ClockMode;
use qmap_orchestrator::{
    run_worker as worker_connect, ExperimentServer, RemoteEvaluator, TransportConfig,
};
use qmap_tuner::{load_settings, run_experiment, sa_parameter_space, standard_settings};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "qmap",
    version,
    about = "Service-placement tools: generate scenarios, solve, export ILP models, benchmark, tune, distribute"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file from a named family or explicit shape.
    Gen(GenArgs),
    /// Run the annealing solver on a scenario.
    Solve(SolveArgs),
    /// Build the ILP model and write it as an LP file.
    IlpGen(IlpGenArgs),
    /// Solve and write a quality-over-time trace CSV.
    Trace(TraceCmd),
    /// Solver-comparison table across scenario families (CSV).
    Table(TableCmd),
    /// First-valid-window scaling sweep on the chain family (CSV).
    Scaling(ScalingCmd),
    /// Run a parameter-tuning experiment plus a default-vs-tuned comparison.
    Tune(TuneCmd),
    /// Serve a tuning experiment to remote workers over TCP.
    MainNode(MainNodeArgs),
    /// Connect to a main node and execute assigned solves.
    Worker(WorkerArgs),
}

#[derive(Args)]
struct ShapeArgs {
    /// Named scenario family preset.
    #[arg(long)]
    family: Option<String>,
    /// Number of requests (overrides the family preset).
    #[arg(long)]
    requests: Option<usize>,
    /// Hardware component count (overrides the family preset).
    #[arg(long)]
    hardware_scale: Option<f64>,
    /// Depth of the software requirement hierarchy.
    #[arg(long)]
    depth: Option<usize>,
    /// Types per level and implementations per type.
    #[arg(long)]
    branching: Option<usize>,
}

impl ShapeArgs {
    fn generate(&self, seed: u64) -> Result<(String, Scenario)> {
        let preset = match &self.family {
            Some(name) => Some(families::family(name).ok_or_else(|| {
                anyhow!(
                    "unknown scenario family {name:?} (known: {})",
                    families::family_names().join(", ")
                )
            })?),
            None => None,
        };
        let requests = self.requests.or(preset.map(|p| p.requests)).unwrap_or(1);
        let hardware_scale = self
            .hardware_scale
            .or(preset.map(|p| p.hardware_scale))
            .unwrap_or(1.0);
        let depth = self.depth.or(preset.map(|p| p.depth)).unwrap_or(1);
        let branching = self.branching.or(preset.map(|p| p.branching)).unwrap_or(1);
        let scenario =
            qmap_core::model::generate_scenario(requests, hardware_scale, depth, branching, seed)?;
        let label = match &self.family {
            Some(name) => name.clone(),
            None => scenario.meta.family.clone(),
        };
        Ok((label, scenario))
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the scenario file.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario file to solve.
    #[arg(long)]
    scenario: PathBuf,
    /// Solver parameters as name=value pairs (comma- or space-separated).
    #[arg(long, num_args = 0.., value_delimiter = ' ')]
    params: Vec<String>,
    /// Solve time limit in seconds.
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the solve trace (elapsed_s,hard,soft,valid) to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Derive time from counted work instead of the wall clock.
    #[arg(long)]
    virtual_clock: bool,
}

#[derive(Args)]
struct IlpGenArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output LP file.
    #[arg(long, default_value = "model.lp")]
    out: PathBuf,
    /// Optional CSV with columns vars,rows,generation_s.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    virtual_clock: bool,
}

#[derive(Args)]
struct TraceCmd {
    /// Scenario file; alternatively use --family to generate one.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, num_args = 0.., value_delimiter = ' ')]
    params: Vec<String>,
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (writes trace.csv).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    virtual_clock: bool,
    /// Node budget for the exact optimum used in the quality column.
    #[arg(long, default_value_t = 5_000_000)]
    oracle_budget: u64,
}

#[derive(Args)]
struct TableCmd {
    /// Families to benchmark (default: all thirteen comparison presets).
    #[arg(long, num_args = 0.., value_delimiter = ',')]
    families: Vec<String>,
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tuned parameters as name=value pairs for the tuned columns.
    #[arg(long, num_args = 0.., value_delimiter = ' ')]
    tuned_params: Vec<String>,
    /// Output directory (writes table.csv).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    virtual_clock: bool,
    #[arg(long, default_value_t = 1_000_000)]
    oracle_budget: u64,
    /// Skip ILP construction above this predicted variable count.
    #[arg(long, default_value_t = 2_000_000)]
    ilp_var_cap: u64,
}

#[derive(Args)]
struct ScalingCmd {
    /// Hardware component counts, strictly ascending.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [64usize, 128, 256, 512, 1024])]
    hwc_counts: Vec<usize>,
    #[arg(long, num_args = 0.., value_delimiter = ' ')]
    params: Vec<String>,
    #[arg(long, default_value_t = 2.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (writes scaling.csv).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    virtual_clock: bool,
}

#[derive(Args)]
struct TuneCmd {
    /// Tuner settings file; defaults to the standard settings.
    #[arg(long)]
    settings: Option<PathBuf>,
    /// Scenario file; alternatively use --family (default: small).
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[command(flatten)]
    shape: ShapeArgs,
    /// Overrides the settings seed when given.
    #[arg(long)]
    seed: Option<u64>,
    /// Solve time limit for the final default-vs-tuned comparison.
    #[arg(long, default_value_t = 60.0)]
    production_time_limit: f64,
    /// Seeds per configuration in the final comparison.
    #[arg(long, default_value_t = 5)]
    comparison_seeds: u32,
    /// Output directory (writes tune-report.csv and tuned-vs-default.csv).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    virtual_clock: bool,
}

#[derive(Args)]
struct MainNodeArgs {
    /// Port to listen on.
    #[arg(long)]
    listen: u16,
    /// Tuner settings file describing the experiment.
    #[arg(long)]
    experiment: PathBuf,
    /// Scenario file; alternatively use --family (default: small).
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (writes tune-report.csv).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Use the virtual experiment clock (worker solves still run their own).
    #[arg(long)]
    virtual_clock: bool,
}

#[derive(Args)]
struct WorkerArgs {
    /// Main node address, HOST:PORT.
    #[arg(long)]
    connect: String,
    /// Worker id announced to the main node.
    #[arg(long)]
    id: Option<String>,
    /// Solve on the virtual clock (deterministic results).
    #[arg(long)]
    virtual_clock: bool,
}

fn clock(virtual_clock: bool) -> ClockMode {
    if virtual_clock {
        ClockMode::virtual_default()
    } else {
        ClockMode::Wall
    }
}

fn parse_params_list(parts: &[String]) -> Result<BTreeMap<String, i64>> {
    Ok(parse_named_values(&parts.join(" "))?)
}

fn load_or_generate(
    scenario: &Option<PathBuf>,
    shape: &ShapeArgs,
    default_family: &str,
    seed: u64,
) -> Result<Scenario> {
    match scenario {
        Some(path) => Ok(load_scenario(path)?),
        None => {
            let shape = if shape.family.is_none()
                && shape.requests.is_none()
                && shape.hardware_scale.is_none()
                && shape.depth.is_none()
                && shape.branching.is_none()
            {
                &ShapeArgs {
                    family: Some(default_family.to_string()),
                    requests: None,
                    hardware_scale: None,
                    depth: None,
                    branching: None,
                }
            } else {
                shape
            };
            Ok(shape.generate(seed)?.1)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run_gen(args: GenArgs) -> Result<()> {
    let (label, scenario) = args.shape.generate(args.seed)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let path = args.out.join(format!("{label}-s{}.toml", args.seed));
    save_scenario(&scenario, &path)?;
    println!(
        "{}",
        serde_json::json!({
            "scenario": path.display().to_string(),
            "family": label,
            "requests": scenario.requests.len(),
            "implementations": scenario.implementations.len(),
            "hardware": scenario.hardware.len(),
        })
    );
    Ok(())
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    let values = parse_params_list(&args.params)?;
    let params = SaParams::from_named_values(&values, args.time_limit, args.seed)?;
    let run = solve_with_clock(&scenario, &params, clock(args.virtual_clock))?;

    if let Some(trace_path) = &args.trace {
        let mut csv = String::from("elapsed_s,hard,soft,valid\n");
        for event in &run.trace.events {
            writeln!(
                csv,
                "{:.3},{},{:.6},{}",
                event.elapsed_s,
                event.score.hard,
                event.score.soft(),
                event.valid
            )?;
        }
        write_file(trace_path, &csv)?;
    }

    println!(
        "{}",
        serde_json::json!({
            "valid": run.best_score.is_valid(),
            "hard": run.best_score.hard,
            "soft": run.best_score.soft(),
            "firstValidAt": run.trace.first_valid_at,
            "lastImprovementAt": run.trace.last_improvement_at,
            "initSeconds": run.init_seconds,
            "totalSeconds": run.total_seconds,
            "steps": run.stats.steps,
        })
    );
    Ok(())
}

fn run_ilp_gen(args: IlpGenArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    let (model, generation_s) = build_ilp_with_clock(&scenario, clock(args.virtual_clock))?;
    write_file(&args.out, &export_lp_string(&model))?;
    if let Some(stats) = &args.stats {
        let csv = format!(
            "vars,rows,generation_s\n{},{},{generation_s:.3}\n",
            model.variable_count(),
            model.row_count()
        );
        write_file(stats, &csv)?;
    }
    println!(
        "{}",
        serde_json::json!({
            "out": args.out.display().to_string(),
            "vars": model.variable_count(),
            "rows": model.row_count(),
            "generationSeconds": generation_s,
        })
    );
    Ok(())
}

fn run_trace(args: TraceCmd) -> Result<()> {
    let scenario = load_or_generate(&args.scenario, &args.shape, "small", args.seed)?;
    let values = parse_params_list(&args.params)?;
    let params = SaParams::from_named_values(&values, args.time_limit, args.seed)?;
    let csv = bench::bench_trace(
        &scenario,
        &bench::TraceArgs {
            params,
            clock: clock(args.virtual_clock),
            oracle_node_budget: args.oracle_budget,
        },
    )?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("trace.csv");
    write_file(&path, &csv)?;
    println!(
        "{}",
        serde_json::json!({ "trace": path.display().to_string() })
    );
    Ok(())
}

fn run_table(args: TableCmd) -> Result<()> {
    let tuned = if args.tuned_params.is_empty() {
        None
    } else {
        Some(parse_params_list(&args.tuned_params)?)
    };
    let families = if args.families.is_empty() {
        bench::TableArgs::default().families
    } else {
        args.families.clone()
    };
    let csv = bench::bench_table(&bench::TableArgs {
        families,
        time_limit_s: args.time_limit,
        seed: args.seed,
        tuned,
        clock: clock(args.virtual_clock),
        oracle_node_budget: args.oracle_budget,
        ilp_var_cap: args.ilp_var_cap,
    })?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("table.csv");
    write_file(&path, &csv)?;
    println!(
        "{}",
        serde_json::json!({ "table": path.display().to_string() })
    );
    Ok(())
}

fn run_scaling(args: ScalingCmd) -> Result<()> {
    let values = parse_params_list(&args.params)?;
    let params = SaParams::from_named_values(&values, args.time_limit, args.seed)?;
    let csv = bench::bench_scaling(&bench::ScalingArgs {
        hwc_counts: args.hwc_counts.clone(),
        params,
        seed: args.seed,
        clock: clock(args.virtual_clock),
    })?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("scaling.csv");
    write_file(&path, &csv)?;
    println!(
        "{}",
        serde_json::json!({ "scaling": path.display().to_string() })
    );
    Ok(())
}

fn load_settings_or_standard(
    path: &Option<PathBuf>,
    seed_override: Option<u64>,
) -> Result<qmap_tuner::TunerSettings> {
    let mut settings = match path {
        Some(p) => load_settings(p)?,
        None => standard_settings(0),
    };
    if let Some(seed) = seed_override {
        settings.seed = seed;
    }
    Ok(settings)
}

fn run_tune(args: TuneCmd) -> Result<()> {
    let settings = load_settings_or_standard(&args.settings, args.seed)?;
    let scenario = load_or_generate(&args.scenario, &args.shape, "small", settings.seed)?;
    let output = tune::bench_tune(
        &scenario,
        &tune::TuneArgs {
            settings,
            production_time_limit_s: args.production_time_limit,
            comparison_seeds: args.comparison_seeds,
            clock: clock(args.virtual_clock),
        },
    )?;
    std::fs::create_dir_all(&args.out)?;
    let report_path = args.out.join("tune-report.csv");
    let comparison_path = args.out.join("tuned-vs-default.csv");
    write_file(&report_path, &output.outcome.report_csv)?;
    write_file(&comparison_path, &output.comparison_csv)?;
    println!(
        "{}",
        serde_json::json!({
            "report": report_path.display().to_string(),
            "comparison": comparison_path.display().to_string(),
            "best": output.tuned,
            "recommended": output.recommended,
            "bestObjective": output.outcome.best_objective,
            "stopReason": output.outcome.stop_reason,
            "evaluations": output.outcome.total_evaluations,
            "medianDefaultSoft": output.median_default_soft,
            "medianTunedSoft": output.median_tuned_soft,
            "medianRecommendedSoft": output.median_recommended_soft,
        })
    );
    Ok(())
}

fn run_main_node(args: MainNodeArgs) -> Result<()> {
    let settings = load_settings_or_standard(&Some(args.experiment.clone()), args.seed)?;
    let scenario = load_or_generate(&args.scenario, &args.shape, "small", settings.seed)?;
    let space = sa_parameter_space();
    let server = ExperimentServer::bind(
        &format!("0.0.0.0:{}", args.listen),
        TransportConfig::default(),
    )?;
    eprintln!("listening on {}; waiting for workers", server.local_addr()?);
    let mut evaluator = RemoteEvaluator::new(
        server,
        qmap_core::model::scenario_to_string(&scenario),
        settings.seed,
    );
    let outcome = run_experiment(&settings, &space, &mut evaluator, clock(args.virtual_clock))?;
    evaluator.server_mut().dismiss();

    std::fs::create_dir_all(&args.out)?;
    let report_path = args.out.join("tune-report.csv");
    write_file(&report_path, &outcome.report_csv)?;
    let best: BTreeMap<String, i64> = outcome
        .best
        .named(&space)
        .into_iter()
        .map(|(n, v)| (n.to_string(), v))
        .collect();
    println!(
        "{}",
        serde_json::json!({
            "report": report_path.display().to_string(),
            "best": best,
            "bestObjective": outcome.best_objective,
            "stopReason": outcome.stop_reason,
            "evaluations": outcome.total_evaluations,
        })
    );
    Ok(())
}

fn run_worker_cmd(args: WorkerArgs) -> Result<()> {
    let worker_id = args
        .id
        .clone()
        .unwrap_or_else(|| format!("w-{}", std::process::id()));
    let executed = worker_connect(
        &args.connect,
        &worker_id,
        clock(args.virtual_clock),
        &TransportConfig::default(),
    )?;
    println!(
        "{}",
        serde_json::json!({ "workerId": worker_id, "executed": executed })
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(args) => run_solve(args),
        Command::IlpGen(args) => run_ilp_gen(args),
        Command::Trace(args) => run_trace(args),
        Command::Table(args) => run_table(args),
        Command::Scaling(args) => run_scaling(args),
        Command::Tune(args) => run_tune(args),
        Command::MainNode(args) => run_main_node(args),
        Command::Worker(args) => run_worker_cmd(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("{}", serde_json::json!({ "error": format!("{e:#}") }));
        std::process::exit(1);
    }
}
