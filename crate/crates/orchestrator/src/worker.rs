//! Worker execution: turn a task message into a result message by running
//! the annealing solver.

use crate::protocol::{ResultMsg, ScenarioRef, TaskMsg};
use qmap_core::model::{load_scenario, parse_scenario_str};
use qmap_core::solver::{solve_with_clock, SaParams};
use qmap_core::{ClockMode, ScenarioError};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkerError {
    #[error("scenario unavailable: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("bad task configuration: {0}")]
    Configuration(String),
}

/// Execute one task: load the scenario, build solver parameters from the
/// configuration (time limit and seed come from the task), solve, and
/// report quality and timing.
pub fn worker_run(
    task: &TaskMsg,
    worker_id: &str,
    clock: ClockMode,
) -> Result<ResultMsg, WorkerError> {
    let scenario = match &task.scenario_ref {
        ScenarioRef::Path(path) => load_scenario(Path::new(path))?,
        ScenarioRef::Inline(text) => parse_scenario_str(text)?,
    };
    let params = SaParams::from_named_values(&task.configuration, task.time_limit_s, task.seed)
        .map_err(|e| WorkerError::Configuration(e.to_string()))?;
    let solved = solve_with_clock(&scenario, &params, clock)?;
    Ok(ResultMsg {
        task_id: task.task_id,
        valid: solved.best_score.is_valid(),
        soft_score: solved.best_score.soft(),
        first_valid_at: solved.trace.first_valid_at,
        last_improvement_at: solved.trace.last_improvement_at,
        worker_id: worker_id.to_string(),
        wall_seconds: solved.total_seconds,
    })
}
