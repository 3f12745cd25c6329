//! Distributed execution of solver runs: a line-delimited JSON protocol,
//! a pure coordinator state machine driven over an explicit timeline,
//! worker-side task execution, a TCP transport, tuner evaluators that run
//! in-process or through the coordinator, and a randomized failure-injection
//! simulator that checks the delivery contract (at-least-once execution,
//! exactly-once result acceptance).

pub mod coordinator;
pub mod evaluator;
pub mod protocol;
pub mod sim;
pub mod transport;
pub mod worker;

pub use coordinator::{
    Coordinator, CoordinatorConfig, ResultDisposition, SweepReport, TaskOutcome, WorkerRecord,
    WorkerState,
};
pub use evaluator::{CoordinatorEvaluator, SolveEvaluator};
pub use protocol::{
    decode_message, encode_message, Message, ProtocolError, ResultMsg, ScenarioRef, TaskMsg,
    PROTOCOL_VERSION,
};
pub use sim::{simulate, SimConfig, SimStats};
pub use transport::{
    run_worker, serve_main_node, ExperimentServer, RemoteEvaluator, TransportConfig,
};
pub use worker::{worker_run, WorkerError};
