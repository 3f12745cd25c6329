//! Move generation: hardware change, hardware swap, implementation change.
//!
//! A move is a precomputed batch of slot changes (random fills included), so
//! applying it is deterministic and the scoreboard's undo record reverses it
//! exactly. A generator that finds no applicable change returns a no-op
//! marker (empty batch); the annealing step resamples another kind.

use super::pool::{Allocation, SlotAssignment};
use crate::model::Compiled;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Reassign one active slot to a different hardware component.
    HwChange,
    /// Exchange the hardware of two active slots.
    HwSwap,
    /// Replace one active slot's implementation with another of the same
    /// type, deactivating orphaned child subtrees and activating (with
    /// random fills) the subtrees the new implementation requires.
    SwcChange,
}

#[derive(Debug, Clone)]
pub struct Move {
    pub kind: MoveKind,
    /// Slot changes; each slot appears at most once. Empty = no-op marker.
    pub changes: Vec<(usize, SlotAssignment)>,
}

impl Move {
    pub fn noop(kind: MoveKind) -> Move {
        Move {
            kind,
            changes: Vec::new(),
        }
    }

    pub fn is_noop(&self) -> bool {
        self.changes.is_empty()
    }
}

pub fn random_kind<R: Rng>(rng: &mut R) -> MoveKind {
    match rng.gen_range(0..3) {
        0 => MoveKind::HwChange,
        1 => MoveKind::HwSwap,
        _ => MoveKind::SwcChange,
    }
}

pub fn generate_move<R: Rng>(
    c: &Compiled,
    alloc: &Allocation,
    rng: &mut R,
    kind: MoveKind,
) -> Move {
    match kind {
        MoveKind::HwChange => hw_change(c, alloc, rng),
        MoveKind::HwSwap => hw_swap(alloc, rng),
        MoveKind::SwcChange => swc_change(c, alloc, rng),
    }
}

/// Pick a uniformly random active slot: bounded rejection sampling, then a
/// wrap-around scan from a random offset.
fn sample_active_slot<R: Rng>(alloc: &Allocation, rng: &mut R) -> Option<usize> {
    let n = alloc.slots.len();
    if n == 0 {
        return None;
    }
    for _ in 0..32 {
        let s = rng.gen_range(0..n);
        if alloc.slots[s].active {
            return Some(s);
        }
    }
    let start = rng.gen_range(0..n);
    (0..n)
        .map(|d| (start + d) % n)
        .find(|&s| alloc.slots[s].active)
}

fn hw_change<R: Rng>(c: &Compiled, alloc: &Allocation, rng: &mut R) -> Move {
    if c.hw.len() < 2 {
        return Move::noop(MoveKind::HwChange);
    }
    let Some(slot) = sample_active_slot(alloc, rng) else {
        return Move::noop(MoveKind::HwChange);
    };
    let cur = alloc.slots[slot];
    let mut hw = rng.gen_range(0..c.hw.len() as u32 - 1);
    if hw >= cur.hw_idx {
        hw += 1;
    }
    Move {
        kind: MoveKind::HwChange,
        changes: vec![(slot, SlotAssignment { hw_idx: hw, ..cur })],
    }
}

fn hw_swap<R: Rng>(alloc: &Allocation, rng: &mut R) -> Move {
    let Some(a) = sample_active_slot(alloc, rng) else {
        return Move::noop(MoveKind::HwSwap);
    };
    for _ in 0..8 {
        let Some(b) = sample_active_slot(alloc, rng) else {
            break;
        };
        if b != a && alloc.slots[b].hw_idx != alloc.slots[a].hw_idx {
            let sa = alloc.slots[a];
            let sb = alloc.slots[b];
            return Move {
                kind: MoveKind::HwSwap,
                changes: vec![
                    (
                        a,
                        SlotAssignment {
                            hw_idx: sb.hw_idx,
                            ..sa
                        },
                    ),
                    (
                        b,
                        SlotAssignment {
                            hw_idx: sa.hw_idx,
                            ..sb
                        },
                    ),
                ],
            };
        }
    }
    Move::noop(MoveKind::HwSwap)
}

fn swc_change<R: Rng>(c: &Compiled, alloc: &Allocation, rng: &mut R) -> Move {
    // Find an active slot whose type offers an alternative implementation.
    let mut slot = None;
    for _ in 0..8 {
        match sample_active_slot(alloc, rng) {
            Some(s) if c.impls_of_type[c.tasks[s].type_idx].len() >= 2 => {
                slot = Some(s);
                break;
            }
            Some(_) => continue,
            None => break,
        }
    }
    let Some(slot) = slot else {
        return Move::noop(MoveKind::SwcChange);
    };

    let cur = alloc.slots[slot];
    let task = &c.tasks[slot];
    let type_impls = &c.impls_of_type[task.type_idx];
    let within_old = c.impls[cur.impl_idx as usize].within_type;
    let mut pick = rng.gen_range(0..type_impls.len() - 1);
    if pick >= within_old {
        pick += 1;
    }
    let new_impl = type_impls[pick];

    let mut changes = vec![(
        slot,
        SlotAssignment {
            active: true,
            impl_idx: new_impl as u32,
            hw_idx: cur.hw_idx,
        },
    )];

    // Children required by the old implementation but not the new one are
    // orphaned: deactivate their whole active subtrees. Children newly
    // required are activated with fresh random fills.
    for (&child_type, &ordinal) in &task.child_of_type {
        let child_slot = task.children[ordinal];
        let was = super::pool::impl_requires_type(c, cur.impl_idx as usize, child_type);
        let now = super::pool::impl_requires_type(c, new_impl, child_type);
        if was && !now {
            deactivate_subtree(c, alloc, child_slot, &mut changes);
        } else if !was && now {
            activate_subtree(c, child_slot, rng, &mut changes);
        }
    }
    Move {
        kind: MoveKind::SwcChange,
        changes,
    }
}

fn deactivate_subtree(
    c: &Compiled,
    alloc: &Allocation,
    slot: usize,
    changes: &mut Vec<(usize, SlotAssignment)>,
) {
    let a = alloc.slots[slot];
    if !a.active {
        // Inactive slots keep inactive subtrees; nothing to do below.
        return;
    }
    changes.push((slot, SlotAssignment { active: false, ..a }));
    for &child in &c.tasks[slot].children {
        deactivate_subtree(c, alloc, child, changes);
    }
}

fn activate_subtree<R: Rng>(
    c: &Compiled,
    slot: usize,
    rng: &mut R,
    changes: &mut Vec<(usize, SlotAssignment)>,
) {
    let task = &c.tasks[slot];
    let impls = &c.impls_of_type[task.type_idx];
    let impl_idx = impls[rng.gen_range(0..impls.len())];
    let hw_idx = rng.gen_range(0..c.hw.len() as u32);
    changes.push((
        slot,
        SlotAssignment {
            active: true,
            impl_idx: impl_idx as u32,
            hw_idx,
        },
    ));
    for sub in &c.impls[impl_idx].requires {
        let ordinal = task.child_of_type[&sub.child_type];
        activate_subtree(c, task.children[ordinal], rng, changes);
    }
}
