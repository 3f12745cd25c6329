//! Main-node coordination: a pure state machine over an explicit timeline.
//!
//! The coordinator owns the task queue, the worker registry, and the result
//! ledger. It performs no I/O and reads no clock — every operation takes
//! `now` in seconds — so the same code drives the socket transport, the
//! in-process pool, and the randomized failure simulations.

use crate::protocol::{ResultMsg, TaskMsg};
use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinatorConfig {
    /// Workers silent for longer than this are declared dead.
    pub heartbeat_timeout_s: f64,
    /// A task may overrun its time limit by this fraction before the
    /// coordinator gives up on it.
    pub grace_fraction: f64,
}

impl Default for CoordinatorConfig {
    fn default() -> Self {
        CoordinatorConfig {
            heartbeat_timeout_s: 10.0,
            grace_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkerState {
    Idle,
    Busy(u64),
    Dead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkerRecord {
    pub worker_id: String,
    pub last_heartbeat_at: f64,
    pub state: WorkerState,
}

/// Final state of a task: the first accepted result, or a failure marker
/// that the caller maps to a sentinel-worst sample.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskOutcome {
    Finished(ResultMsg),
    Failed { reason: String },
}

#[derive(Debug, Clone)]
struct InFlight {
    task: TaskMsg,
    worker_id: String,
    dispatched_at: f64,
}

/// What `on_result` did with a message.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultDisposition {
    pub accepted: bool,
    /// A still-running duplicate assignment to cancel: (worker, task).
    pub cancel: Option<(String, u64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    pub died: Vec<String>,
    pub requeued: Vec<u64>,
    pub failed: Vec<u64>,
    /// Assignments to abort because the task failed: (worker, task). The
    /// caller delivers these as cancel messages.
    pub cancels: Vec<(String, u64)>,
}

#[derive(Debug)]
pub struct Coordinator {
    config: CoordinatorConfig,
    queue: VecDeque<TaskMsg>,
    workers: BTreeMap<String, WorkerRecord>,
    in_flight: BTreeMap<u64, InFlight>,
    outcomes: BTreeMap<u64, TaskOutcome>,
    known_tasks: BTreeMap<u64, ()>,
    /// Human-readable event log (dropped duplicates, deaths, requeues).
    log: Vec<String>,
}

impl Coordinator {
    pub fn new(config: CoordinatorConfig) -> Self {
        Coordinator {
            config,
            queue: VecDeque::new(),
            workers: BTreeMap::new(),
            in_flight: BTreeMap::new(),
            outcomes: BTreeMap::new(),
            known_tasks: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    /// Register (or revive) a worker; it starts idle. A re-registration is a
    /// fresh session, so a task the previous session was running is requeued.
    pub fn on_hello(&mut self, worker_id: &str, now: f64) {
        if let Some(w) = self.workers.get(worker_id) {
            if let WorkerState::Busy(task_id) = w.state {
                if let Some(entry) = self.in_flight.remove(&task_id) {
                    self.log.push(format!(
                        "worker {worker_id} re-registered; task {task_id} requeued"
                    ));
                    self.queue.push_front(entry.task);
                }
            }
        }
        self.workers.insert(
            worker_id.to_string(),
            WorkerRecord {
                worker_id: worker_id.to_string(),
                last_heartbeat_at: now,
                state: WorkerState::Idle,
            },
        );
    }

    pub fn on_heartbeat(&mut self, worker_id: &str, now: f64) {
        if let Some(w) = self.workers.get_mut(worker_id) {
            w.last_heartbeat_at = now;
            if w.state == WorkerState::Dead {
                w.state = WorkerState::Idle;
            }
        }
    }

    /// A worker said goodbye (or its connection closed): it holds no tasks
    /// afterwards; an in-flight task is requeued.
    pub fn on_bye(&mut self, worker_id: &str) {
        let Some(w) = self.workers.get_mut(worker_id) else {
            return;
        };
        if let WorkerState::Busy(task_id) = w.state {
            if let Some(entry) = self.in_flight.remove(&task_id) {
                self.log
                    .push(format!("worker {worker_id} left; task {task_id} requeued"));
                self.queue.push_front(entry.task);
            }
        }
        w.state = WorkerState::Dead;
    }

    /// Enqueue a task. Task ids are unique per experiment; resubmitting a
    /// known id is rejected.
    pub fn submit(&mut self, task: TaskMsg) -> Result<(), String> {
        if self.known_tasks.contains_key(&task.task_id) {
            return Err(format!("task id {} already submitted", task.task_id));
        }
        self.known_tasks.insert(task.task_id, ());
        self.queue.push_back(task);
        Ok(())
    }

    /// FIFO dispatch onto idle live workers (worker-id order). Returns the
    /// assignments made; the caller delivers them.
    pub fn dispatch(&mut self, now: f64) -> Vec<(String, TaskMsg)> {
        let mut assignments = Vec::new();
        let idle: Vec<String> = self
            .workers
            .values()
            .filter(|w| w.state == WorkerState::Idle)
            .map(|w| w.worker_id.clone())
            .collect();
        for worker_id in idle {
            let Some(task) = self.queue.pop_front() else {
                break;
            };
            self.workers.get_mut(&worker_id).expect("registered").state =
                WorkerState::Busy(task.task_id);
            self.in_flight.insert(
                task.task_id,
                InFlight {
                    task: task.clone(),
                    worker_id: worker_id.clone(),
                    dispatched_at: now,
                },
            );
            assignments.push((worker_id, task));
        }
        assignments
    }

    /// Accept or discard a result. The first result per task wins; anything
    /// later — duplicates, late answers from workers already declared dead —
    /// is discarded. Accepting a result whose task was reassigned cancels
    /// the newer assignment.
    pub fn on_result(&mut self, msg: ResultMsg, _now: f64) -> ResultDisposition {
        let task_id = msg.task_id;
        if !self.known_tasks.contains_key(&task_id) {
            self.log
                .push(format!("result for unknown task {task_id} discarded"));
            return ResultDisposition {
                accepted: false,
                cancel: None,
            };
        }
        if self.outcomes.contains_key(&task_id) {
            self.log.push(format!(
                "duplicate result for task {task_id} from {} discarded",
                msg.worker_id
            ));
            return ResultDisposition {
                accepted: false,
                cancel: None,
            };
        }

        let mut cancel = None;
        let reporter = msg.worker_id.clone();
        if let Some(entry) = self.in_flight.remove(&task_id) {
            if entry.worker_id != reporter {
                // The task had been reassigned; the reporter's (stale)
                // result still wins and the new assignment is cancelled.
                cancel = Some((entry.worker_id.clone(), task_id));
            }
            self.mark_idle_if_busy_with(&entry.worker_id, task_id);
        } else if let Some(queued) = self.queue.iter().position(|t| t.task_id == task_id) {
            // Result raced the requeue (the worker was declared dead but
            // delivered after all): drop the queued copy.
            self.queue.remove(queued);
        }
        self.mark_idle_if_busy_with(&reporter, task_id);
        self.outcomes.insert(task_id, TaskOutcome::Finished(msg));
        ResultDisposition {
            accepted: true,
            cancel,
        }
    }

    fn mark_idle_if_busy_with(&mut self, worker_id: &str, task_id: u64) {
        if let Some(w) = self.workers.get_mut(worker_id) {
            if w.state == WorkerState::Busy(task_id) {
                w.state = WorkerState::Idle;
            }
        }
    }

    /// Liveness and timeout pass: silent workers die and their tasks are
    /// requeued (front, keeping the original order near-FIFO); tasks that
    /// overran their limit plus grace are marked failed and their workers
    /// freed. The caller delivers cancels for failed tasks.
    pub fn sweep(&mut self, now: f64) -> SweepReport {
        let mut report = SweepReport::default();

        let silent: Vec<String> = self
            .workers
            .values()
            .filter(|w| {
                w.state != WorkerState::Dead
                    && now - w.last_heartbeat_at > self.config.heartbeat_timeout_s
            })
            .map(|w| w.worker_id.clone())
            .collect();
        for worker_id in silent {
            let w = self.workers.get_mut(&worker_id).expect("listed");
            let state = w.state;
            w.state = WorkerState::Dead;
            self.log.push(format!("worker {worker_id} declared dead"));
            report.died.push(worker_id.clone());
            if let WorkerState::Busy(task_id) = state {
                if let Some(entry) = self.in_flight.remove(&task_id) {
                    self.log
                        .push(format!("task {task_id} requeued after {worker_id} died"));
                    self.queue.push_front(entry.task);
                    report.requeued.push(task_id);
                }
            }
        }

        let overrun: Vec<u64> = self
            .in_flight
            .iter()
            .filter(|(_, e)| {
                let allowance = e.task.time_limit_s * (1.0 + self.config.grace_fraction);
                now - e.dispatched_at > allowance
            })
            .map(|(&id, _)| id)
            .collect();
        for task_id in overrun {
            let entry = self.in_flight.remove(&task_id).expect("listed");
            self.log.push(format!(
                "task {task_id} overran its limit on {}; marked failed",
                entry.worker_id
            ));
            self.mark_idle_if_busy_with(&entry.worker_id, task_id);
            report.cancels.push((entry.worker_id.clone(), task_id));
            self.outcomes.insert(
                task_id,
                TaskOutcome::Failed {
                    reason: format!("overran time limit on worker {}", entry.worker_id),
                },
            );
            report.failed.push(task_id);
        }
        report
    }

    pub fn all_done(&self) -> bool {
        self.queue.is_empty() && self.in_flight.is_empty()
    }

    pub fn outcomes(&self) -> &BTreeMap<u64, TaskOutcome> {
        &self.outcomes
    }

    pub fn workers(&self) -> &BTreeMap<String, WorkerRecord> {
        &self.workers
    }

    pub fn queued_count(&self) -> usize {
        self.queue.len()
    }

    pub fn in_flight_count(&self) -> usize {
        self.in_flight.len()
    }

    /// The worker currently assigned to a task, if any.
    pub fn assignee(&self, task_id: u64) -> Option<&str> {
        self.in_flight.get(&task_id).map(|e| e.worker_id.as_str())
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ScenarioRef;
    use std::collections::BTreeMap as Map;

    fn task(id: u64) -> TaskMsg {
        TaskMsg {
            task_id: id,
            scenario_ref: ScenarioRef::Path("s.toml".into()),
            configuration: Map::new(),
            time_limit_s: 10.0,
            repetition_index: 0,
            seed: id,
        }
    }

    fn result(id: u64, worker: &str) -> ResultMsg {
        ResultMsg {
            task_id: id,
            valid: true,
            soft_score: 1.0,
            first_valid_at: Some(0.1),
            last_improvement_at: Some(0.5),
            worker_id: worker.into(),
            wall_seconds: 10.0,
        }
    }

    #[test]
    fn one_task_one_idle_worker_is_assigned() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.submit(task(1)).unwrap();
        let assigned = c.dispatch(0.0);
        assert_eq!(assigned.len(), 1);
        assert_eq!(assigned[0].0, "w-1");
        assert_eq!(assigned[0].1.task_id, 1);
        assert_eq!(c.workers()["w-1"].state, WorkerState::Busy(1));
    }

    #[test]
    fn three_tasks_two_workers_leave_one_queued() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.on_hello("w-2", 0.0);
        for id in 1..=3 {
            c.submit(task(id)).unwrap();
        }
        let assigned = c.dispatch(0.0);
        assert_eq!(assigned.len(), 2);
        // FIFO: earliest tasks go out first, to workers in id order.
        assert_eq!(assigned[0], ("w-1".to_string(), task(1)));
        assert_eq!(assigned[1], ("w-2".to_string(), task(2)));
        assert_eq!(c.queued_count(), 1);
    }

    #[test]
    fn recent_heartbeat_keeps_a_worker_alive() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.on_heartbeat("w-1", 9.0);
        let report = c.sweep(10.0); // silent for 1 s, threshold 10 s
        assert!(report.died.is_empty());
        assert_eq!(c.workers()["w-1"].state, WorkerState::Idle);
    }

    #[test]
    fn silence_past_the_threshold_kills_and_requeues() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.submit(task(1)).unwrap();
        c.dispatch(0.0);
        let report = c.sweep(11.0); // silent for 11 s > 10 s
        assert_eq!(report.died, vec!["w-1".to_string()]);
        assert_eq!(report.requeued, vec![1]);
        assert_eq!(c.workers()["w-1"].state, WorkerState::Dead);
        assert_eq!(c.queued_count(), 1);
        // A later worker picks the task up again.
        c.on_hello("w-2", 11.0);
        let assigned = c.dispatch(11.0);
        assert_eq!(assigned[0].0, "w-2");
    }

    #[test]
    fn duplicate_results_are_discarded() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.submit(task(1)).unwrap();
        c.dispatch(0.0);
        assert!(c.on_result(result(1, "w-1"), 1.0).accepted);
        let second = c.on_result(result(1, "w-1"), 1.1);
        assert!(!second.accepted);
        assert_eq!(c.outcomes().len(), 1);
        assert!(c.log().iter().any(|l| l.contains("duplicate result")));
    }

    #[test]
    fn late_result_from_a_dead_worker_wins_and_cancels_the_reassignment() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.submit(task(1)).unwrap();
        c.dispatch(0.0);
        c.sweep(11.0); // w-1 dies, task requeued
        c.on_hello("w-2", 11.0);
        c.dispatch(11.0); // reassigned to w-2
        let disposition = c.on_result(result(1, "w-1"), 12.0);
        assert!(disposition.accepted, "first result accepted even if stale");
        assert_eq!(disposition.cancel, Some(("w-2".to_string(), 1)));
        assert_eq!(c.workers()["w-2"].state, WorkerState::Idle);
        // w-2's own answer afterwards is a duplicate.
        assert!(!c.on_result(result(1, "w-2"), 13.0).accepted);
    }

    #[test]
    fn overrun_tasks_fail_with_a_sentinel_outcome() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.submit(task(1)).unwrap(); // limit 10 s, grace 10% → 11 s allowance
        c.dispatch(0.0);
        c.on_heartbeat("w-1", 11.5); // alive but stuck
        let report = c.sweep(11.5);
        assert_eq!(report.failed, vec![1]);
        assert_eq!(report.cancels, vec![("w-1".to_string(), 1)]);
        assert!(matches!(c.outcomes()[&1], TaskOutcome::Failed { .. }));
        assert_eq!(c.workers()["w-1"].state, WorkerState::Idle);
        assert!(c.all_done());
    }

    #[test]
    fn a_re_registering_busy_worker_releases_its_task() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.on_hello("w-1", 0.0);
        c.submit(task(1)).unwrap();
        c.dispatch(0.0);
        // The worker crashes and reconnects before any timeout fires.
        c.on_hello("w-1", 2.0);
        assert_eq!(c.workers()["w-1"].state, WorkerState::Idle);
        assert_eq!(c.queued_count(), 1);
        assert_eq!(c.in_flight_count(), 0);
        let assigned = c.dispatch(2.0);
        assert_eq!(assigned[0].1.task_id, 1, "same task goes out again");
    }

    #[test]
    fn duplicate_task_ids_are_rejected_at_submission() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        c.submit(task(1)).unwrap();
        assert!(c.submit(task(1)).is_err());
    }

    #[test]
    fn results_for_unknown_tasks_are_discarded() {
        let mut c = Coordinator::new(CoordinatorConfig::default());
        let disposition = c.on_result(result(99, "w-1"), 0.0);
        assert!(!disposition.accepted);
        assert!(c.outcomes().is_empty());
    }
}
