//! Randomized failure-injection harness for the coordinator.
//!
//! Drives the pure state machine over a stepped virtual timeline with
//! simulated workers that crash, hang, revive, and deliver late or duplicate
//! results. The harness checks the delivery contract on every step:
//! at-least-once execution, exactly-once acceptance, no task held by two
//! live workers, and eventual completion. Any breach returns `Err`.

use crate::coordinator::{Coordinator, CoordinatorConfig, TaskOutcome, WorkerState};
use crate::protocol::{ResultMsg, ScenarioRef, TaskMsg};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub workers: usize,
    pub tasks: usize,
    /// Per-step probability that a live worker crashes (stops heartbeating
    /// and executing). Worker 0 never crashes, guaranteeing liveness.
    pub death_probability: f64,
    /// Probability that a crashed worker's in-progress result still arrives
    /// later (after it has been declared dead and the task requeued).
    pub late_delivery_probability: f64,
    /// Per-delivery probability that a result is sent twice.
    pub duplicate_probability: f64,
    /// Per-step probability that a crashed worker reconnects.
    pub revival_probability: f64,
    /// Per-solve probability that the solve hangs past the task's allowance
    /// (the coordinator must fail it and free the worker).
    pub hang_probability: f64,
    pub heartbeat_timeout_s: f64,
    pub task_time_limit_s: f64,
    pub step_s: f64,
    pub max_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            workers: 4,
            tasks: 20,
            death_probability: 0.02,
            late_delivery_probability: 0.4,
            duplicate_probability: 0.15,
            revival_probability: 0.03,
            hang_probability: 0.05,
            heartbeat_timeout_s: 5.0,
            task_time_limit_s: 10.0,
            step_s: 0.5,
            max_steps: 20_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimStats {
    pub steps: usize,
    pub deaths: usize,
    pub revivals: usize,
    pub requeues: usize,
    pub duplicates_delivered: usize,
    pub late_deliveries: usize,
    pub cancels: usize,
    pub hangs: usize,
    pub finished: usize,
    pub failed: usize,
    /// Total solve executions started on live workers (≥ tasks when
    /// everything finished — at-least-once).
    pub executions: usize,
}

struct SimWorker {
    id: String,
    alive: bool,
    immortal: bool,
    /// (task id, finish time) of the solve currently running.
    busy: Option<(u64, f64)>,
}

struct PendingDelivery {
    deliver_at: f64,
    msg: ResultMsg,
}

fn make_result(task_id: u64, worker_id: &str, started_at: f64, finished_at: f64) -> ResultMsg {
    // Deterministic stand-in for a solver answer; the payload content is
    // irrelevant to the coordination contract.
    ResultMsg {
        task_id,
        valid: true,
        soft_score: 1000.0 + task_id as f64,
        first_valid_at: Some(0.1),
        last_improvement_at: Some((finished_at - started_at).max(0.1) / 2.0),
        worker_id: worker_id.to_string(),
        wall_seconds: finished_at - started_at,
    }
}

/// Run one randomized simulation. Returns statistics, or `Err` describing
/// the first invariant breach.
pub fn simulate(seed: u64, config: &SimConfig) -> Result<SimStats, String> {
    if config.workers == 0 || config.tasks == 0 {
        return Err("simulation needs at least one worker and one task".to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SimStats::default();
    let mut coordinator = Coordinator::new(CoordinatorConfig {
        heartbeat_timeout_s: config.heartbeat_timeout_s,
        grace_fraction: 0.1,
    });

    let mut workers: Vec<SimWorker> = (0..config.workers)
        .map(|i| SimWorker {
            id: format!("w-{i}"),
            alive: true,
            immortal: i == 0,
            busy: None,
        })
        .collect();
    for w in &workers {
        coordinator.on_hello(&w.id, 0.0);
    }
    for task_id in 0..config.tasks as u64 {
        coordinator
            .submit(TaskMsg {
                task_id,
                scenario_ref: ScenarioRef::Path("sim.toml".to_string()),
                configuration: BTreeMap::new(),
                time_limit_s: config.task_time_limit_s,
                repetition_index: 0,
                seed: task_id,
            })
            .map_err(|e| format!("submit rejected: {e}"))?;
    }

    let mut pending: Vec<PendingDelivery> = Vec::new();
    // How often each task started executing on a live worker.
    let mut executions: BTreeMap<u64, usize> = BTreeMap::new();
    // Exactly-once ledger maintained by the harness, independent of the
    // coordinator's own bookkeeping.
    let mut accepted: BTreeMap<u64, String> = BTreeMap::new();

    let deliver = |coordinator: &mut Coordinator,
                   workers: &mut Vec<SimWorker>,
                   accepted: &mut BTreeMap<u64, String>,
                   stats: &mut SimStats,
                   msg: ResultMsg,
                   now: f64|
     -> Result<(), String> {
        let task_id = msg.task_id;
        let reporter = msg.worker_id.clone();
        let disposition = coordinator.on_result(msg, now);
        if disposition.accepted {
            if let Some(previous) = accepted.insert(task_id, reporter.clone()) {
                return Err(format!(
                    "task {task_id} accepted twice (from {previous} and {reporter}) at {now}"
                ));
            }
        }
        if let Some((cancel_worker, cancel_task)) = disposition.cancel {
            stats.cancels += 1;
            // The cancelled worker aborts its (now pointless) solve.
            if let Some(w) = workers.iter_mut().find(|w| w.id == cancel_worker) {
                if matches!(w.busy, Some((t, _)) if t == cancel_task) {
                    w.busy = None;
                }
            }
        }
        Ok(())
    };

    for step in 0..config.max_steps {
        let now = step as f64 * config.step_s;
        stats.steps = step + 1;

        // 1. Live workers heartbeat.
        for w in workers.iter().filter(|w| w.alive) {
            coordinator.on_heartbeat(&w.id, now);
        }

        // 2. Random crashes. A crashed worker goes silent mid-solve; its
        //    result is either lost or delivered late (after the death
        //    threshold has passed and the task has been requeued).
        for w in workers.iter_mut().filter(|w| w.alive && !w.immortal) {
            if rng.gen_bool(config.death_probability) {
                w.alive = false;
                stats.deaths += 1;
                if let Some((task_id, _)) = w.busy.take() {
                    if rng.gen_bool(config.late_delivery_probability) {
                        let delay = config.heartbeat_timeout_s + rng.gen_range(1.0..5.0);
                        pending.push(PendingDelivery {
                            deliver_at: now + delay,
                            msg: make_result(task_id, &w.id, now, now + delay),
                        });
                    }
                }
            }
        }

        // 3. Random revivals (reconnect with the same id).
        for w in workers.iter_mut().filter(|w| !w.alive) {
            if rng.gen_bool(config.revival_probability) {
                w.alive = true;
                stats.revivals += 1;
                coordinator.on_hello(&w.id, now);
            }
        }

        // 4. Death/timeout sweep; abort solves the coordinator cancelled.
        let report = coordinator.sweep(now);
        stats.requeues += report.requeued.len();
        for (cancel_worker, cancel_task) in report.cancels {
            stats.cancels += 1;
            if let Some(w) = workers.iter_mut().find(|w| w.id == cancel_worker) {
                if matches!(w.busy, Some((t, _)) if t == cancel_task) {
                    w.busy = None;
                }
            }
        }

        // 5. Dispatch. Assignments to crashed workers are lost in transit;
        //    assignments to a worker the coordinator freed early (overrun)
        //    while it is still grinding are dropped by the worker.
        for (worker_id, task) in coordinator.dispatch(now) {
            let w = workers
                .iter_mut()
                .find(|w| w.id == worker_id)
                .expect("dispatched to a registered worker");
            if !w.alive || w.busy.is_some() {
                continue;
            }
            let duration = if rng.gen_bool(config.hang_probability) {
                stats.hangs += 1;
                config.task_time_limit_s * (1.0 + 0.1) + config.heartbeat_timeout_s
            } else {
                rng.gen_range(0.5..0.4 * config.task_time_limit_s)
            };
            w.busy = Some((task.task_id, now + duration));
            *executions.entry(task.task_id).or_insert(0) += 1;
            stats.executions += 1;
        }

        // 6. Finished solves deliver results (sometimes twice).
        let mut to_deliver: Vec<ResultMsg> = Vec::new();
        for w in workers.iter_mut().filter(|w| w.alive) {
            if let Some((task_id, finish_at)) = w.busy {
                if finish_at <= now {
                    w.busy = None;
                    let msg = make_result(task_id, &w.id, finish_at - 1.0, finish_at);
                    if rng.gen_bool(config.duplicate_probability) {
                        stats.duplicates_delivered += 1;
                        to_deliver.push(msg.clone());
                    }
                    to_deliver.push(msg);
                }
            }
        }
        for msg in to_deliver {
            deliver(
                &mut coordinator,
                &mut workers,
                &mut accepted,
                &mut stats,
                msg,
                now,
            )?;
        }

        // 7. Late deliveries from crashed workers.
        let due: Vec<usize> = pending
            .iter()
            .enumerate()
            .filter(|(_, p)| p.deliver_at <= now)
            .map(|(i, _)| i)
            .collect();
        for i in due.into_iter().rev() {
            let p = pending.remove(i);
            stats.late_deliveries += 1;
            deliver(
                &mut coordinator,
                &mut workers,
                &mut accepted,
                &mut stats,
                p.msg,
                now,
            )?;
        }

        // 8. Invariants that must hold on every step.
        let mut held: BTreeMap<u64, &str> = BTreeMap::new();
        for w in workers.iter().filter(|w| w.alive) {
            if let Some((task_id, _)) = w.busy {
                if let Some(other) = held.insert(task_id, &w.id) {
                    return Err(format!(
                        "task {task_id} running on two live workers ({other} and {}) at {now}",
                        w.id
                    ));
                }
            }
        }
        for (task_id, worker_id) in coordinator.workers().iter().filter_map(|(id, w)| {
            if let WorkerState::Busy(t) = w.state {
                Some((t, id.clone()))
            } else {
                None
            }
        }) {
            if coordinator.assignee(task_id) != Some(worker_id.as_str()) {
                return Err(format!(
                    "bookkeeping split: {worker_id} marked busy with task {task_id} \
                     but the task's assignee differs at {now}"
                ));
            }
        }

        if coordinator.all_done() && pending.is_empty() {
            break;
        }
    }

    if !coordinator.all_done() {
        return Err(format!(
            "liveness violation: {} queued / {} in flight after {} steps",
            coordinator.queued_count(),
            coordinator.in_flight_count(),
            stats.steps
        ));
    }

    // Terminal checks: every task has exactly one outcome; finished tasks
    // executed at least once; accepted results match outcomes.
    let outcomes = coordinator.outcomes();
    if outcomes.len() != config.tasks {
        return Err(format!(
            "{} outcomes for {} tasks",
            outcomes.len(),
            config.tasks
        ));
    }
    for (task_id, outcome) in outcomes {
        match outcome {
            TaskOutcome::Finished(msg) => {
                stats.finished += 1;
                let executed = executions.get(task_id).copied().unwrap_or(0);
                if executed == 0 {
                    return Err(format!("task {task_id} finished without ever executing"));
                }
                match accepted.get(task_id) {
                    Some(worker) if *worker == msg.worker_id => {}
                    Some(worker) => {
                        return Err(format!(
                            "task {task_id} outcome credits {}, harness accepted {worker}",
                            msg.worker_id
                        ));
                    }
                    None => {
                        return Err(format!(
                            "task {task_id} finished but the harness saw no acceptance"
                        ));
                    }
                }
            }
            TaskOutcome::Failed { .. } => {
                stats.failed += 1;
                if accepted.contains_key(task_id) {
                    return Err(format!("task {task_id} failed after a result was accepted"));
                }
            }
        }
    }
    Ok(stats)
}
