//! Request decomposition: the worst-case task list a scenario can ever need.
//!
//! The solver pre-allocates one assignment slot per task and never allocates
//! during search, so the task list must cover every implementation choice:
//! each task's children are the union of required types over all
//! implementations of the task's type.

use super::{Compiled, NfpMap, Scenario, ScenarioError};

/// Human-facing view of one task (slot) in a request's requirement tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskView {
    pub request_id: String,
    /// Child ordinals from the request root; empty for the root task.
    pub slot_path: Vec<usize>,
    pub component_type: String,
    /// NFP bounds propagated from the parent (the request's own bounds for
    /// root tasks).
    pub nfp_min: NfpMap,
    pub nfp_max: NfpMap,
}

/// Decompose all requests into their worst-case task lists, in request order
/// then slot order.
pub fn decompose_tasks(scenario: &Scenario) -> Result<Vec<TaskView>, ScenarioError> {
    let compiled = Compiled::new(scenario)?;
    Ok(compiled
        .tasks
        .iter()
        .map(|t| TaskView {
            request_id: compiled.requests[t.request].id.clone(),
            slot_path: t.slot_path.clone(),
            component_type: compiled.type_ids[t.type_idx].clone(),
            nfp_min: t.nfp_min.clone(),
            nfp_max: t.nfp_max.clone(),
        })
        .collect())
}

/// Number of assignment slots one request of the given target type needs in
/// the worst case over all implementation choices.
pub fn compute_max_assignments(
    scenario: &Scenario,
    request_id: &str,
) -> Result<usize, ScenarioError> {
    let compiled = Compiled::new(scenario)?;
    let ri = compiled
        .requests
        .iter()
        .position(|r| r.id == request_id)
        .ok_or_else(|| ScenarioError::UnknownId(request_id.to_string()))?;
    Ok(compiled.request_tasks(ri).count())
}
