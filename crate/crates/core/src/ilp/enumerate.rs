//! Exhaustive reference search. Enumerates every complete assignment —
//! all implementations of a slot's type (no window pruning) on all hardware —
//! and keeps the best one the straight-line validator accepts. Exponential;
//! meant for cross-checking the branch-and-bound oracle on small instances.

use crate::model::Compiled;
use crate::solver::{validate_allocation, Allocation, SlotAssignment};

/// Number of complete assignments `enumerate_best` would visit (saturating).
pub fn count_complete_assignments(c: &Compiled) -> u64 {
    fn per_type(c: &Compiled, t: usize) -> u64 {
        c.impls_of_type[t]
            .iter()
            .map(|&s| {
                c.impls[s]
                    .requires
                    .iter()
                    .map(|sub| per_type(c, sub.child_type))
                    .fold(c.hw.len() as u64, u64::saturating_mul)
            })
            .fold(0u64, u64::saturating_add)
    }
    c.requests
        .iter()
        .map(|r| per_type(c, r.target_type))
        .fold(1u64, u64::saturating_mul)
}

/// Best valid complete assignment by exhaustive enumeration:
/// `(energy micro-units, per-task choices)`, or `None` when no complete
/// assignment passes validation.
pub fn enumerate_best(c: &Compiled) -> Option<(i64, Vec<Option<(usize, usize)>>)> {
    let filler: Vec<SlotAssignment> = c
        .tasks
        .iter()
        .map(|t| SlotAssignment {
            active: false,
            impl_idx: c.impls_of_type[t.type_idx][0] as u32,
            hw_idx: 0,
        })
        .collect();
    let mut state = Enumerate {
        c,
        alloc: Allocation { slots: filler },
        best: None,
    };
    let roots: Vec<usize> = c.requests.iter().map(|r| r.root_task).collect();
    state.walk(&roots);
    state.best
}

struct Enumerate<'a> {
    c: &'a Compiled,
    alloc: Allocation,
    best: Option<(i64, Vec<Option<(usize, usize)>>)>,
}

impl Enumerate<'_> {
    /// Decide the open slots in order; each choice activates the children its
    /// implementation requires.
    fn walk(&mut self, open: &[usize]) {
        let Some((&slot, rest)) = open.split_first() else {
            self.finish();
            return;
        };
        let task = &self.c.tasks[slot];
        for &s in &self.c.impls_of_type[task.type_idx] {
            let mut next: Vec<usize> = rest.to_vec();
            for sub in &self.c.impls[s].requires {
                let child = task.children[task.child_of_type[&sub.child_type]];
                if !next.contains(&child) {
                    next.push(child);
                }
            }
            for h in 0..self.c.hw.len() {
                self.alloc.slots[slot] = SlotAssignment {
                    active: true,
                    impl_idx: s as u32,
                    hw_idx: h as u32,
                };
                self.walk(&next);
            }
        }
        self.alloc.slots[slot] = SlotAssignment {
            active: false,
            ..self.alloc.slots[slot]
        };
    }

    fn finish(&mut self) {
        if !validate_allocation(self.c, &self.alloc) {
            return;
        }
        let energy: i64 = self
            .alloc
            .slots
            .iter()
            .filter(|a| a.active)
            .map(|a| self.c.energy_micro(a.impl_idx as usize, a.hw_idx as usize))
            .sum();
        let better = match &self.best {
            None => true,
            Some((obj, _)) => energy < *obj,
        };
        if better {
            let assignment = self
                .alloc
                .slots
                .iter()
                .map(|a| {
                    if a.active {
                        Some((a.impl_idx as usize, a.hw_idx as usize))
                    } else {
                        None
                    }
                })
                .collect();
            self.best = Some((energy, assignment));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_scenario;

    #[test]
    fn trivial_scenario_counts_one_assignment() {
        let s = generate_scenario(1, 1.0, 1, 1, 7).unwrap();
        let c = Compiled::new(&s).unwrap();
        assert_eq!(count_complete_assignments(&c), 1);
        let (energy, assignment) = enumerate_best(&c).unwrap();
        assert_eq!(energy, c.energy_micro(0, 0));
        assert_eq!(assignment, vec![Some((0, 0))]);
    }

    #[test]
    fn count_multiplies_choices_per_slot() {
        // Depth 1, branching 2: one slot, 2 impls, 3 hardware -> 6.
        let s = generate_scenario(1, 3.0, 1, 2, 5).unwrap();
        let c = Compiled::new(&s).unwrap();
        assert_eq!(count_complete_assignments(&c), 6);
    }
}
