//! The pre-allocated assignment pool.
//!
//! One [`SlotAssignment`] exists per worst-case task; search only flips
//! active flags and rewrites implementation/hardware choices, never
//! allocating pool entries.

use crate::model::{Compiled, ScenarioError, Witness};
use rand::Rng;

/// State of one pool slot. `impl_idx` and `hw_idx` are global indices into
/// the compiled scenario and stay meaningful only while `active` is set;
/// inactive slots keep their last values so deltas restore exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotAssignment {
    pub active: bool,
    pub impl_idx: u32,
    pub hw_idx: u32,
}

/// The solver's mutable solution: one slot per task, task order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub slots: Vec<SlotAssignment>,
}

impl Allocation {
    pub fn active_count(&self) -> usize {
        self.slots.iter().filter(|s| s.active).count()
    }
}

pub(crate) fn impl_requires_type(c: &Compiled, impl_idx: usize, type_idx: usize) -> bool {
    c.impls[impl_idx]
        .requires
        .iter()
        .any(|s| s.child_type == type_idx)
}

/// Build the full worst-case pool with random per-slot choices. Roots start
/// active; a child starts active exactly when its parent is active and the
/// parent's implementation requires the child's type.
pub fn initial_allocation<R: Rng>(c: &Compiled, rng: &mut R) -> Allocation {
    let mut slots: Vec<SlotAssignment> = Vec::with_capacity(c.tasks.len());
    for task in &c.tasks {
        let impls = &c.impls_of_type[task.type_idx];
        let impl_idx = impls[rng.gen_range(0..impls.len())] as u32;
        let hw_idx = rng.gen_range(0..c.hw.len()) as u32;
        let active = match task.parent {
            None => true,
            Some(p) => {
                let parent = slots[p];
                parent.active && impl_requires_type(c, parent.impl_idx as usize, task.type_idx)
            }
        };
        slots.push(SlotAssignment {
            active,
            impl_idx,
            hw_idx,
        });
    }
    Allocation { slots }
}

/// Materialize a generator witness as an allocation: witness slots active
/// with their recorded choices, all other pool slots inactive.
pub fn allocation_from_witness(
    c: &Compiled,
    witness: &Witness,
) -> Result<Allocation, ScenarioError> {
    let mut slots: Vec<SlotAssignment> = c
        .tasks
        .iter()
        .map(|t| SlotAssignment {
            active: false,
            impl_idx: c.impls_of_type[t.type_idx][0] as u32,
            hw_idx: 0,
        })
        .collect();
    for ws in &witness.slots {
        let request = c
            .requests
            .iter()
            .position(|r| r.id == ws.request_id)
            .ok_or_else(|| ScenarioError::UnknownId(ws.request_id.clone()))?;
        let mut slot = c.requests[request].root_task;
        for type_id in ws.type_path.iter().skip(1) {
            let type_idx = c
                .type_ids
                .iter()
                .position(|t| t == type_id)
                .ok_or_else(|| ScenarioError::UnknownId(type_id.clone()))?;
            let task = &c.tasks[slot];
            let ordinal = *task
                .child_of_type
                .get(&type_idx)
                .ok_or_else(|| ScenarioError::UnknownId(type_id.clone()))?;
            slot = task.children[ordinal];
        }
        let impl_idx = c
            .impls
            .iter()
            .position(|i| i.id == ws.impl_id)
            .ok_or_else(|| ScenarioError::UnknownId(ws.impl_id.clone()))?;
        let hw_idx =
            c.hw.iter()
                .position(|h| h.id == ws.hw_id)
                .ok_or_else(|| ScenarioError::UnknownId(ws.hw_id.clone()))?;
        slots[slot] = SlotAssignment {
            active: true,
            impl_idx: impl_idx as u32,
            hw_idx: hw_idx as u32,
        };
    }
    Ok(Allocation { slots })
}
