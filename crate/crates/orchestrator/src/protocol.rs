//! Wire protocol: newline-delimited JSON messages.
//!
//! Every line is one message object with a `type` discriminator. A
//! connection opens with `hello`, which carries the protocol version; the
//! remaining kinds are `heartbeat`, `task`, `result`, `cancel`, and `bye`.
//! Unknown fields and unknown kinds are rejected — a version bump is the
//! only compatible way to extend the grammar.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const PROTOCOL_VERSION: u32 = 1;

/// Where the worker finds the scenario: a filesystem path it can read, or
/// the scenario text inlined into the message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "camelCase")]
pub enum ScenarioRef {
    Path(String),
    Inline(String),
}

/// One evaluation order: solve `scenario` with `configuration` for
/// `time_limit_s` seconds, seeded by `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TaskMsg {
    pub task_id: u64,
    pub scenario_ref: ScenarioRef,
    /// Solver parameters by canonical name.
    pub configuration: BTreeMap<String, i64>,
    pub time_limit_s: f64,
    pub repetition_index: u32,
    pub seed: u64,
}

/// A worker's answer to a task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ResultMsg {
    pub task_id: u64,
    pub valid: bool,
    pub soft_score: f64,
    pub first_valid_at: Option<f64>,
    pub last_improvement_at: Option<f64>,
    pub worker_id: String,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase", deny_unknown_fields)]
pub enum Message {
    /// Connection opener; `v` is the protocol version.
    #[serde(rename_all = "camelCase")]
    Hello {
        v: u32,
        worker_id: String,
    },
    #[serde(rename_all = "camelCase")]
    Heartbeat {
        worker_id: String,
    },
    Task(TaskMsg),
    Result(ResultMsg),
    #[serde(rename_all = "camelCase")]
    Cancel {
        task_id: u64,
    },
    #[serde(rename_all = "camelCase")]
    Bye {
        worker_id: String,
    },
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("protocol version mismatch: peer speaks {found}, this node speaks {supported}")]
    VersionMismatch { found: u32, supported: u32 },
}

/// Encode a message as one JSON line (trailing newline included).
pub fn encode_message(msg: &Message) -> String {
    let mut line = serde_json::to_string(msg).expect("protocol messages serialize");
    line.push('\n');
    line
}

/// Decode one line. The line may carry its trailing newline.
pub fn decode_message(line: &str) -> Result<Message, ProtocolError> {
    serde_json::from_str(line.trim_end_matches(['\r', '\n']))
        .map_err(|e| ProtocolError::Malformed(e.to_string()))
}
