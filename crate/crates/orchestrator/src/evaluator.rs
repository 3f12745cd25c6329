//! Bridges from the tuner's evaluator interface to solver executions:
//! directly in-process, or through the coordinator state machine as a
//! single-worker pool (no networking, deterministic).

use crate::coordinator::{Coordinator, CoordinatorConfig, TaskOutcome};
use crate::protocol::{ScenarioRef, TaskMsg};
use crate::worker::worker_run;
use qmap_core::model::Scenario;
use qmap_core::solver::{solve_with_clock, SaParams};
use qmap_core::ClockMode;
use qmap_tuner::{derive_eval_seed, Configuration, EvalSample, Evaluator, SearchSpaceDef};
use std::collections::BTreeMap;

fn named_map(space: &SearchSpaceDef, config: &Configuration) -> BTreeMap<String, i64> {
    config
        .named(space)
        .into_iter()
        .map(|(n, v)| (n.to_string(), v))
        .collect()
}

/// Runs the solver in-process for each evaluation. The per-evaluation seed
/// folds the experiment seed, the configuration, and the repetition index,
/// so repetitions differ but replays are exact.
pub struct SolveEvaluator {
    scenario: Scenario,
    base_seed: u64,
    clock: ClockMode,
}

impl SolveEvaluator {
    pub fn new(scenario: Scenario, base_seed: u64, clock: ClockMode) -> Self {
        SolveEvaluator {
            scenario,
            base_seed,
            clock,
        }
    }
}

impl Evaluator for SolveEvaluator {
    fn evaluate(
        &mut self,
        space: &SearchSpaceDef,
        config: &Configuration,
        repetition: u32,
        time_limit_s: f64,
    ) -> Result<EvalSample, String> {
        let seed = derive_eval_seed(self.base_seed, &config.to_param_string(space), repetition);
        let params = SaParams::from_named_values(&named_map(space, config), time_limit_s, seed)
            .map_err(|e| e.to_string())?;
        let solved =
            solve_with_clock(&self.scenario, &params, self.clock).map_err(|e| e.to_string())?;
        Ok(EvalSample {
            valid: solved.best_score.is_valid(),
            soft: solved.best_score.soft(),
            first_valid_at: solved.trace.first_valid_at,
            seconds: solved.total_seconds,
        })
    }
}

/// Routes every evaluation through the coordinator as a one-worker pool:
/// submit → dispatch → execute → accept result. Exercises the full task
/// lifecycle without sockets; results are identical to [`SolveEvaluator`]
/// under a virtual clock.
pub struct CoordinatorEvaluator {
    coordinator: Coordinator,
    scenario_text: String,
    worker_id: String,
    base_seed: u64,
    clock: ClockMode,
    next_task_id: u64,
    now: f64,
}

impl CoordinatorEvaluator {
    pub fn new(scenario_text: String, base_seed: u64, clock: ClockMode) -> Self {
        let mut coordinator = Coordinator::new(CoordinatorConfig::default());
        let worker_id = "local-0".to_string();
        coordinator.on_hello(&worker_id, 0.0);
        CoordinatorEvaluator {
            coordinator,
            scenario_text,
            worker_id,
            base_seed,
            clock,
            next_task_id: 0,
            now: 0.0,
        }
    }

    pub fn coordinator(&self) -> &Coordinator {
        &self.coordinator
    }
}

impl Evaluator for CoordinatorEvaluator {
    fn evaluate(
        &mut self,
        space: &SearchSpaceDef,
        config: &Configuration,
        repetition: u32,
        time_limit_s: f64,
    ) -> Result<EvalSample, String> {
        let task_id = self.next_task_id;
        self.next_task_id += 1;
        let seed = derive_eval_seed(self.base_seed, &config.to_param_string(space), repetition);
        let task = TaskMsg {
            task_id,
            scenario_ref: ScenarioRef::Inline(self.scenario_text.clone()),
            configuration: named_map(space, config),
            time_limit_s,
            repetition_index: repetition,
            seed,
        };
        self.coordinator.on_heartbeat(&self.worker_id, self.now);
        self.coordinator.submit(task.clone())?;
        let assigned = self.coordinator.dispatch(self.now);
        debug_assert_eq!(assigned.len(), 1, "single idle worker takes the task");

        match worker_run(&task, &self.worker_id, self.clock) {
            Ok(result) => {
                self.now += result.wall_seconds.max(0.0) + 1e-3;
                self.coordinator.on_heartbeat(&self.worker_id, self.now);
                let disposition = self.coordinator.on_result(result, self.now);
                debug_assert!(disposition.accepted);
            }
            Err(e) => {
                // Execution failure: let the task run out of its allowance so
                // the sweep records the sentinel failure outcome.
                self.now += time_limit_s * 1.2 + 1e-3;
                self.coordinator.on_heartbeat(&self.worker_id, self.now);
                self.coordinator.sweep(self.now);
                return Err(e.to_string());
            }
        }

        match self.coordinator.outcomes().get(&task_id) {
            Some(TaskOutcome::Finished(r)) => Ok(EvalSample {
                valid: r.valid,
                soft: r.soft_score,
                first_valid_at: r.first_valid_at,
                seconds: r.wall_seconds,
            }),
            Some(TaskOutcome::Failed { reason }) => Err(reason.clone()),
            None => Err("task ended without an outcome".to_string()),
        }
    }
}
