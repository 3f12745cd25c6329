//! Scoring: lexicographic hard/soft score with exact incremental maintenance.
//!
//! All bookkeeping is integer (milli resource units, micro energy units), so
//! applying a delta and undoing it restores byte-identical state and the
//! incremental score always equals a from-scratch rescore.

use super::pool::{impl_requires_type, Allocation, SlotAssignment};
use crate::model::Compiled;
use std::fmt;

/// Lexicographic score: fewer violation points always beats lower energy.
/// Lower is better on both levels; `Ord` derives that ordering directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score {
    /// Weighted violation points (0 = valid).
    pub hard: i64,
    /// Total energy of active assignments, micro-units.
    pub soft_micro: i64,
}

impl Score {
    pub const ZERO: Score = Score {
        hard: 0,
        soft_micro: 0,
    };

    pub fn is_valid(&self) -> bool {
        self.hard == 0
    }

    /// Energy in natural units.
    pub fn soft(&self) -> f64 {
        self.soft_micro as f64 / 1e6
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}hard/{:.6}soft", self.hard, self.soft())
    }
}

/// Hard-score weights taken from the solver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreWeights {
    /// Per hardware resource kind over capacity.
    pub sub_factor: i64,
    /// Per unsatisfied software slot.
    pub sw_factor: i64,
}

/// Delta record returned by [`ScoreBoard::apply`]; feeding it back through
/// `apply` reverses the move exactly.
#[derive(Debug, Clone)]
pub struct Undo {
    changes: Vec<(usize, SlotAssignment)>,
}

impl Undo {
    pub fn changes(&self) -> &[(usize, SlotAssignment)] {
        &self.changes
    }
}

/// Incrementally maintained score state for one allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreBoard {
    weights: ScoreWeights,
    /// Resource utilization per hardware component, milli-units.
    util_milli: Vec<[i64; 4]>,
    /// Per (hardware, kind): utilization currently over capacity?
    exceeded: Vec<[bool; 4]>,
    exceeded_count: i64,
    /// Per slot: does it currently count as unsatisfied?
    violated: Vec<bool>,
    violated_count: i64,
    soft_micro: i64,
}

impl ScoreBoard {
    /// Full from-scratch build.
    pub fn new(c: &Compiled, alloc: &Allocation, weights: ScoreWeights) -> Self {
        let mut board = ScoreBoard {
            weights,
            util_milli: vec![[0; 4]; c.hw.len()],
            exceeded: vec![[false; 4]; c.hw.len()],
            exceeded_count: 0,
            violated: vec![false; c.tasks.len()],
            violated_count: 0,
            soft_micro: 0,
        };
        for a in &alloc.slots {
            if a.active {
                board.add_load(c, *a);
            }
        }
        for slot in 0..c.tasks.len() {
            board.reeval_violation(c, alloc, slot);
        }
        board
    }

    pub fn score(&self) -> Score {
        Score {
            hard: self.weights.sub_factor * self.exceeded_count
                + self.weights.sw_factor * self.violated_count,
            soft_micro: self.soft_micro,
        }
    }

    pub fn weights(&self) -> ScoreWeights {
        self.weights
    }

    /// Apply a batch of slot changes, updating the allocation and the score
    /// state. Each slot may appear at most once in the batch. The returned
    /// [`Undo`], applied through this same method, restores the previous
    /// allocation and score state exactly.
    pub fn apply(
        &mut self,
        c: &Compiled,
        alloc: &mut Allocation,
        changes: &[(usize, SlotAssignment)],
    ) -> Undo {
        let mut undo = Vec::with_capacity(changes.len());
        let mut affected: Vec<usize> = Vec::with_capacity(changes.len() * 3);
        for &(slot, new) in changes {
            let old = alloc.slots[slot];
            undo.push((slot, old));
            if old.active {
                self.remove_load(c, old);
            }
            if new.active {
                self.add_load(c, new);
            }
            alloc.slots[slot] = new;
            affected.push(slot);
            if let Some(p) = c.tasks[slot].parent {
                affected.push(p);
            }
            affected.extend_from_slice(&c.tasks[slot].children);
        }
        affected.sort_unstable();
        affected.dedup();
        for &slot in &affected {
            self.reeval_violation(c, alloc, slot);
        }
        Undo { changes: undo }
    }

    /// Apply an undo record (see [`ScoreBoard::apply`]).
    pub fn undo(&mut self, c: &Compiled, alloc: &mut Allocation, undo: Undo) {
        let _ = self.apply(c, alloc, &undo.changes);
    }

    fn add_load(&mut self, c: &Compiled, a: SlotAssignment) {
        let imp = a.impl_idx as usize;
        let hw = a.hw_idx as usize;
        let req = &c.impls[imp].req_milli;
        for k in 0..4 {
            self.util_milli[hw][k] += req[k];
            self.refresh_exceeded(c, hw, k);
        }
        self.soft_micro += c.energy_micro(imp, hw);
    }

    fn remove_load(&mut self, c: &Compiled, a: SlotAssignment) {
        let imp = a.impl_idx as usize;
        let hw = a.hw_idx as usize;
        let req = &c.impls[imp].req_milli;
        for k in 0..4 {
            self.util_milli[hw][k] -= req[k];
            self.refresh_exceeded(c, hw, k);
        }
        self.soft_micro -= c.energy_micro(imp, hw);
    }

    fn refresh_exceeded(&mut self, c: &Compiled, hw: usize, kind: usize) {
        let now = self.util_milli[hw][kind] > c.hw[hw].cap_milli[kind];
        let was = self.exceeded[hw][kind];
        if now != was {
            self.exceeded[hw][kind] = now;
            self.exceeded_count += if now { 1 } else { -1 };
        }
    }

    fn reeval_violation(&mut self, c: &Compiled, alloc: &Allocation, slot: usize) {
        let now = slot_violated(c, alloc, slot);
        let was = self.violated[slot];
        if now != was {
            self.violated[slot] = now;
            self.violated_count += if now { 1 } else { -1 };
        }
    }
}

/// Violation predicate for one slot. Each broken condition is counted on
/// exactly one slot:
/// - an inactive root (unserved request) counts on the root;
/// - an active slot whose parent is inactive or does not require its type
///   (an orphan) counts on the child;
/// - an unmet sub-requirement (child slot inactive, or its implementation
///   outside the requirement's NFP window) counts on the parent;
/// - an active root whose implementation misses the request window counts on
///   the root.
fn slot_violated(c: &Compiled, alloc: &Allocation, slot: usize) -> bool {
    let task = &c.tasks[slot];
    let a = alloc.slots[slot];
    match task.parent {
        None => {
            if !a.active {
                return true;
            }
            let within = c.impls[a.impl_idx as usize].within_type;
            if !task.compat_within[within] {
                return true;
            }
            subrequirements_unmet(c, alloc, slot, a)
        }
        Some(parent) => {
            if !a.active {
                return false;
            }
            let pa = alloc.slots[parent];
            if !pa.active || !impl_requires_type(c, pa.impl_idx as usize, task.type_idx) {
                return true;
            }
            subrequirements_unmet(c, alloc, slot, a)
        }
    }
}

fn subrequirements_unmet(c: &Compiled, alloc: &Allocation, slot: usize, a: SlotAssignment) -> bool {
    let task = &c.tasks[slot];
    for sub in &c.impls[a.impl_idx as usize].requires {
        let ordinal = task.child_of_type[&sub.child_type];
        let child = alloc.slots[task.children[ordinal]];
        if !child.active {
            return true;
        }
        if !sub.compat[c.impls[child.impl_idx as usize].within_type] {
            return true;
        }
    }
    false
}

/// Independent straight-line validity check (no incremental bookkeeping):
/// the active set must be exactly the tree induced by the chosen
/// implementations, every window must hold, and no hardware capacity may be
/// exceeded. `hard == 0` under any positive weights iff this accepts.
pub fn validate_allocation(c: &Compiled, alloc: &Allocation) -> bool {
    // Expected active set: roots, then required children of active slots.
    let mut expected = vec![false; c.tasks.len()];
    for r in &c.requests {
        expected[r.root_task] = true;
    }
    for slot in 0..c.tasks.len() {
        if !expected[slot] {
            continue;
        }
        let a = alloc.slots[slot];
        if !a.active {
            return false;
        }
        let task = &c.tasks[slot];
        for sub in &c.impls[a.impl_idx as usize].requires {
            expected[task.children[task.child_of_type[&sub.child_type]]] = true;
        }
    }
    for slot in 0..c.tasks.len() {
        if alloc.slots[slot].active != expected[slot] {
            return false;
        }
    }

    // Windows: request window on roots, sub-requirement windows on children.
    for slot in 0..c.tasks.len() {
        let a = alloc.slots[slot];
        if !a.active {
            continue;
        }
        let task = &c.tasks[slot];
        if task.parent.is_none() {
            let within = c.impls[a.impl_idx as usize].within_type;
            if !task.compat_within[within] {
                return false;
            }
        }
        for sub in &c.impls[a.impl_idx as usize].requires {
            let child = alloc.slots[task.children[task.child_of_type[&sub.child_type]]];
            if !sub.compat[c.impls[child.impl_idx as usize].within_type] {
                return false;
            }
        }
    }

    // Capacities.
    let mut util = vec![[0i64; 4]; c.hw.len()];
    for a in &alloc.slots {
        if !a.active {
            continue;
        }
        let req = &c.impls[a.impl_idx as usize].req_milli;
        for k in 0..4 {
            util[a.hw_idx as usize][k] += req[k];
        }
    }
    for (hw, u) in util.iter().enumerate() {
        for k in 0..4 {
            if u[k] > c.hw[hw].cap_milli[k] {
                return false;
            }
        }
    }
    true
}
