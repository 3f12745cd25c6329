//! Socket transport: newline-delimited JSON messages over TCP.
//!
//! [`ExperimentServer`] owns the listening socket, the coordinator, and a
//! wall-clock origin. Reader threads feed decoded messages into a channel;
//! pumping the server applies them to the state machine and then sweeps and
//! dispatches. [`serve_main_node`] runs a fixed task list to completion;
//! [`RemoteEvaluator`] instead submits one task per tuner evaluation, which
//! lets a whole tuning experiment run against remote workers.
//!
//! Workers connect, announce themselves, heartbeat from a side thread, and
//! run one solve at a time.

use crate::coordinator::{Coordinator, CoordinatorConfig, TaskOutcome};
use crate::protocol::{
    decode_message, encode_message, Message, ResultMsg, ScenarioRef, TaskMsg, PROTOCOL_VERSION,
};
use crate::worker::worker_run;
use qmap_core::ClockMode;
use qmap_tuner::{derive_eval_seed, Configuration, EvalSample, Evaluator, SearchSpaceDef};
use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportConfig {
    /// How often workers send heartbeats.
    pub heartbeat_interval_s: f64,
    pub coordinator: CoordinatorConfig,
    /// Serve-loop wakeup interval for sweeps when no messages arrive.
    pub poll_interval_ms: u64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            heartbeat_interval_s: 2.0,
            coordinator: CoordinatorConfig::default(),
            poll_interval_ms: 200,
        }
    }
}

enum Event {
    Connected(usize, TcpStream),
    Line(usize, Message),
    Closed(usize),
}

fn spawn_reader(conn_id: usize, stream: TcpStream, events: Sender<Event>) {
    std::thread::spawn(move || {
        let reader = BufReader::new(stream);
        for line in reader.lines() {
            let Ok(line) = line else { break };
            if line.trim().is_empty() {
                continue;
            }
            // Malformed lines are dropped; the connection survives.
            if let Ok(msg) = decode_message(&line) {
                if events.send(Event::Line(conn_id, msg)).is_err() {
                    return;
                }
            }
        }
        let _ = events.send(Event::Closed(conn_id));
    });
}

fn send_line(stream: &mut TcpStream, msg: &Message) -> std::io::Result<()> {
    stream.write_all(encode_message(msg).as_bytes())?;
    stream.flush()
}

/// A main node: listener, coordinator, and connected-worker bookkeeping.
pub struct ExperimentServer {
    listener: TcpListener,
    origin: Instant,
    events_tx: Sender<Event>,
    events_rx: Receiver<Event>,
    coordinator: Coordinator,
    config: TransportConfig,
    next_conn_id: usize,
    writers: HashMap<usize, TcpStream>,
    conn_of_worker: HashMap<String, usize>,
    worker_of_conn: HashMap<usize, String>,
}

impl ExperimentServer {
    pub fn bind(addr: &str, config: TransportConfig) -> std::io::Result<Self> {
        Self::from_listener(TcpListener::bind(addr)?, config)
    }

    pub fn from_listener(listener: TcpListener, config: TransportConfig) -> std::io::Result<Self> {
        listener.set_nonblocking(true)?;
        let (events_tx, events_rx) = channel();
        Ok(ExperimentServer {
            listener,
            origin: Instant::now(),
            events_tx,
            events_rx,
            coordinator: Coordinator::new(config.coordinator),
            config,
            next_conn_id: 0,
            writers: HashMap::new(),
            conn_of_worker: HashMap::new(),
            worker_of_conn: HashMap::new(),
        })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn coordinator(&self) -> &Coordinator {
        &self.coordinator
    }

    pub fn connected_workers(&self) -> usize {
        self.conn_of_worker.len()
    }

    pub fn submit(&mut self, task: TaskMsg) -> std::io::Result<()> {
        self.coordinator
            .submit(task)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))
    }

    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }

    fn accept_pending(&mut self) -> std::io::Result<()> {
        loop {
            match self.listener.accept() {
                Ok((stream, _)) => {
                    let conn_id = self.next_conn_id;
                    self.next_conn_id += 1;
                    let reader = stream.try_clone()?;
                    let _ = self.events_tx.send(Event::Connected(conn_id, stream));
                    spawn_reader(conn_id, reader, self.events_tx.clone());
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => return Ok(()),
                Err(e) => return Err(e),
            }
        }
    }

    fn cancel_on(&mut self, worker_id: &str, task_id: u64) {
        if let Some(conn_id) = self.conn_of_worker.get(worker_id) {
            if let Some(stream) = self.writers.get_mut(conn_id) {
                let _ = send_line(stream, &Message::Cancel { task_id });
            }
        }
    }

    fn handle_event(&mut self, event: Event) {
        let now = self.now();
        match event {
            Event::Connected(conn_id, stream) => {
                self.writers.insert(conn_id, stream);
            }
            Event::Line(conn_id, msg) => match msg {
                Message::Hello { v, worker_id } => {
                    if v != PROTOCOL_VERSION {
                        if let Some(stream) = self.writers.remove(&conn_id) {
                            let _ = stream.shutdown(Shutdown::Both);
                        }
                    } else {
                        self.conn_of_worker.insert(worker_id.clone(), conn_id);
                        self.worker_of_conn.insert(conn_id, worker_id.clone());
                        self.coordinator.on_hello(&worker_id, now);
                    }
                }
                Message::Heartbeat { worker_id } => self.coordinator.on_heartbeat(&worker_id, now),
                Message::Result(result) => {
                    let disposition = self.coordinator.on_result(result, now);
                    if let Some((worker_id, task_id)) = disposition.cancel {
                        self.cancel_on(&worker_id, task_id);
                    }
                }
                Message::Bye { worker_id } => self.coordinator.on_bye(&worker_id),
                // Workers do not send task or cancel messages; ignore.
                Message::Task(_) | Message::Cancel { .. } => {}
            },
            Event::Closed(conn_id) => {
                if let Some(worker_id) = self.worker_of_conn.remove(&conn_id) {
                    // Only a worker's *current* connection closing ends its
                    // session; a stale socket from before a reconnect doesn't.
                    if self.conn_of_worker.get(&worker_id) == Some(&conn_id) {
                        self.conn_of_worker.remove(&worker_id);
                        self.coordinator.on_bye(&worker_id);
                    }
                }
                self.writers.remove(&conn_id);
            }
        }
    }

    fn sweep_and_dispatch(&mut self) {
        let now = self.now();
        let report = self.coordinator.sweep(now);
        for (worker_id, task_id) in report.cancels {
            self.cancel_on(&worker_id, task_id);
        }
        for (worker_id, task) in self.coordinator.dispatch(now) {
            let delivered = self
                .conn_of_worker
                .get(&worker_id)
                .and_then(|conn_id| self.writers.get_mut(conn_id))
                .map(|stream| send_line(stream, &Message::Task(task)).is_ok())
                .unwrap_or(false);
            if !delivered {
                // Undeliverable assignment: treat as a goodbye so the task
                // requeues immediately instead of waiting out the timeout.
                self.coordinator.on_bye(&worker_id);
            }
        }
    }

    /// One serve-loop cycle: accept connections, apply at most one message
    /// (or time out), then sweep and dispatch.
    pub fn pump(&mut self) -> std::io::Result<()> {
        self.accept_pending()?;
        match self
            .events_rx
            .recv_timeout(Duration::from_millis(self.config.poll_interval_ms))
        {
            Ok(event) => self.handle_event(event),
            Err(RecvTimeoutError::Timeout) => {}
            Err(RecvTimeoutError::Disconnected) => {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::BrokenPipe,
                    "event channel closed",
                ));
            }
        }
        self.sweep_and_dispatch();
        Ok(())
    }

    /// Pump until the given task has an outcome.
    pub fn wait_for(&mut self, task_id: u64) -> std::io::Result<TaskOutcome> {
        loop {
            if let Some(outcome) = self.coordinator.outcomes().get(&task_id) {
                return Ok(outcome.clone());
            }
            self.pump()?;
        }
    }

    /// Pump until no submitted task is queued or in flight.
    pub fn run_all(&mut self) -> std::io::Result<()> {
        while !self.coordinator.all_done() {
            self.pump()?;
        }
        Ok(())
    }

    /// Send every connected worker a goodbye and close its socket.
    pub fn dismiss(&mut self) {
        for (worker_id, conn_id) in &self.conn_of_worker {
            if let Some(stream) = self.writers.get_mut(conn_id) {
                let _ = send_line(
                    stream,
                    &Message::Bye {
                        worker_id: worker_id.clone(),
                    },
                );
                let _ = stream.shutdown(Shutdown::Both);
            }
        }
        self.conn_of_worker.clear();
        self.worker_of_conn.clear();
        self.writers.clear();
    }
}

/// Serve a fixed experiment task list over the given listener until every
/// task has an outcome, then dismiss the workers and return the ledger.
pub fn serve_main_node(
    listener: TcpListener,
    tasks: Vec<TaskMsg>,
    config: &TransportConfig,
) -> std::io::Result<BTreeMap<u64, TaskOutcome>> {
    let mut server = ExperimentServer::from_listener(listener, *config)?;
    for task in tasks {
        server.submit(task)?;
    }
    server.run_all()?;
    server.dismiss();
    Ok(server.coordinator().outcomes().clone())
}

/// Tuner evaluator that executes every evaluation on remote workers: one
/// coordinator task per evaluation, submitted and awaited sequentially.
pub struct RemoteEvaluator {
    server: ExperimentServer,
    scenario_text: String,
    base_seed: u64,
    next_task_id: u64,
}

impl RemoteEvaluator {
    pub fn new(server: ExperimentServer, scenario_text: String, base_seed: u64) -> Self {
        RemoteEvaluator {
            server,
            scenario_text,
            base_seed,
            next_task_id: 0,
        }
    }

    pub fn server_mut(&mut self) -> &mut ExperimentServer {
        &mut self.server
    }

    pub fn server(&self) -> &ExperimentServer {
        &self.server
    }
}

impl Evaluator for RemoteEvaluator {
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
        let configuration: BTreeMap<String, i64> = config
            .named(space)
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect();
        let task = TaskMsg {
            task_id,
            scenario_ref: ScenarioRef::Inline(self.scenario_text.clone()),
            configuration,
            time_limit_s,
            repetition_index: repetition,
            seed,
        };
        self.server.submit(task).map_err(|e| e.to_string())?;
        match self.server.wait_for(task_id).map_err(|e| e.to_string())? {
            TaskOutcome::Finished(r) => Ok(EvalSample {
                valid: r.valid,
                soft: r.soft_score,
                first_valid_at: r.first_valid_at,
                seconds: r.wall_seconds,
            }),
            TaskOutcome::Failed { reason } => Err(reason),
        }
    }
}

/// Connect to a main node, execute assigned tasks until dismissed (or the
/// connection drops), and return the number of tasks executed.
pub fn run_worker(
    addr: &str,
    worker_id: &str,
    clock: ClockMode,
    config: &TransportConfig,
) -> std::io::Result<usize> {
    let stream = TcpStream::connect(addr)?;
    let writer = Arc::new(Mutex::new(stream.try_clone()?));
    send_line(
        &mut writer.lock().expect("writer lock"),
        &Message::Hello {
            v: PROTOCOL_VERSION,
            worker_id: worker_id.to_string(),
        },
    )?;

    let stop = Arc::new(AtomicBool::new(false));
    let heartbeat = {
        let writer = Arc::clone(&writer);
        let stop = Arc::clone(&stop);
        let worker_id = worker_id.to_string();
        let interval = Duration::from_secs_f64(config.heartbeat_interval_s.max(0.01));
        std::thread::spawn(move || {
            while !stop.load(Ordering::Relaxed) {
                std::thread::sleep(interval);
                let msg = Message::Heartbeat {
                    worker_id: worker_id.clone(),
                };
                if send_line(&mut writer.lock().expect("writer lock"), &msg).is_err() {
                    break;
                }
            }
        })
    };

    let mut executed = 0usize;
    let reader = BufReader::new(stream);
    for line in reader.lines() {
        let Ok(line) = line else { break };
        if line.trim().is_empty() {
            continue;
        }
        let Ok(msg) = decode_message(&line) else {
            continue;
        };
        match msg {
            Message::Task(task) => {
                let result = match worker_run(&task, worker_id, clock) {
                    Ok(result) => result,
                    Err(_) => {
                        // Report the failure as an invalid result so the task
                        // is not retried forever on a broken input. (The wire
                        // format carries no error text; f64::MAX keeps the
                        // sentinel JSON-safe, unlike infinity.)
                        ResultMsg {
                            task_id: task.task_id,
                            valid: false,
                            soft_score: f64::MAX,
                            first_valid_at: None,
                            last_improvement_at: None,
                            worker_id: worker_id.to_string(),
                            wall_seconds: 0.0,
                        }
                    }
                };
                executed += 1;
                if send_line(
                    &mut writer.lock().expect("writer lock"),
                    &Message::Result(result),
                )
                .is_err()
                {
                    break;
                }
            }
            // A cancel arriving between tasks needs no action: the solve it
            // targeted has already finished or was never started here.
            Message::Cancel { .. } => {}
            Message::Bye { .. } => break,
            Message::Hello { .. } | Message::Heartbeat { .. } | Message::Result(_) => {}
        }
    }

    stop.store(true, Ordering::Relaxed);
    let _ = send_line(
        &mut writer.lock().expect("writer lock"),
        &Message::Bye {
            worker_id: worker_id.to_string(),
        },
    );
    let _ = heartbeat.join();
    Ok(executed)
}
