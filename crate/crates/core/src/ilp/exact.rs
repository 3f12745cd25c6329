//! Exact branch-and-bound solver: the optimality oracle for small instances.
//!
//! Depth-first over task → (implementation, hardware) choices. The open task
//! with the largest minimum energy is decided first and values are tried in
//! ascending energy, so the lower bound (current energy + per-task minima of
//! the remaining open tasks) prunes early.

use crate::model::{Compiled, Scenario, ScenarioError};
use crate::solver::{Allocation, SlotAssignment};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    /// Per task: chosen (global implementation index, hardware index);
    /// `None` for slots the chosen implementations never activate.
    pub assignment: Vec<Option<(usize, usize)>>,
    /// Total energy, micro-units.
    pub objective_micro: i64,
    /// True iff the search space was exhausted within the node budget.
    pub proved_optimal: bool,
    pub nodes_explored: u64,
}

impl ExactSolution {
    pub fn objective(&self) -> f64 {
        self.objective_micro as f64 / 1e6
    }

    /// Convert into a solver allocation (inactive slots get placeholder
    /// choices, which scoring ignores).
    pub fn to_allocation(&self, c: &Compiled) -> Allocation {
        let slots = self
            .assignment
            .iter()
            .enumerate()
            .map(|(t, a)| match a {
                Some((s, h)) => SlotAssignment {
                    active: true,
                    impl_idx: *s as u32,
                    hw_idx: *h as u32,
                },
                None => SlotAssignment {
                    active: false,
                    impl_idx: c.impls_of_type[c.tasks[t].type_idx][0] as u32,
                    hw_idx: 0,
                },
            })
            .collect();
        Allocation { slots }
    }
}

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("no feasible assignment exists ({nodes} nodes explored)")]
    Infeasible { nodes: u64 },
    #[error("node budget exhausted after {nodes} nodes with no feasible assignment found")]
    BudgetExhausted { nodes: u64 },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

pub fn exact_solve(scenario: &Scenario, node_budget: u64) -> Result<ExactSolution, ExactError> {
    let compiled = Compiled::new(scenario)?;
    exact_solve_compiled(&compiled, node_budget)
}

pub fn exact_solve_compiled(c: &Compiled, node_budget: u64) -> Result<ExactSolution, ExactError> {
    // Value lists per task: (energy, implementation, hardware), ascending.
    let mut choices: Vec<Vec<(i64, usize, usize)>> = Vec::with_capacity(c.tasks.len());
    for task in &c.tasks {
        let mut list: Vec<(i64, usize, usize)> = task
            .compat_impls
            .iter()
            .flat_map(|&s| (0..c.hw.len()).map(move |h| (0i64, s, h)))
            .collect();
        for entry in &mut list {
            entry.0 = c.energy_micro(entry.1, entry.2);
        }
        list.sort_unstable();
        choices.push(list);
    }
    let min_energy: Vec<i64> = choices
        .iter()
        .map(|l| l.first().map(|e| e.0).unwrap_or(i64::MAX))
        .collect();

    let mut search = Search {
        c,
        choices,
        min_energy,
        remaining: c.hw.iter().map(|h| h.cap_milli).collect(),
        assignment: vec![None; c.tasks.len()],
        best: None,
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    let mut frontier: Vec<Open> = c
        .requests
        .iter()
        .map(|r| Open {
            task: r.root_task,
            masks: Vec::new(),
        })
        .collect();
    search.dfs(&mut frontier, 0);

    match (search.best, search.exhausted) {
        (Some((objective_micro, assignment)), exhausted) => Ok(ExactSolution {
            assignment,
            objective_micro,
            proved_optimal: !exhausted,
            nodes_explored: search.nodes,
        }),
        (None, false) => Err(ExactError::Infeasible {
            nodes: search.nodes,
        }),
        (None, true) => Err(ExactError::BudgetExhausted {
            nodes: search.nodes,
        }),
    }
}

/// An activated, not-yet-decided task and the NFP-window masks (within-type
/// indexed) its implementation must pass — one mask per sub-requirement the
/// parent's chosen implementation placed on it.
struct Open<'a> {
    task: usize,
    masks: Vec<&'a [bool]>,
}

struct Search<'a> {
    c: &'a Compiled,
    choices: Vec<Vec<(i64, usize, usize)>>,
    min_energy: Vec<i64>,
    remaining: Vec<[i64; 4]>,
    assignment: Vec<Option<(usize, usize)>>,
    best: Option<(i64, Vec<Option<(usize, usize)>>)>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn dfs(&mut self, frontier: &mut Vec<Open<'a>>, current: i64) {
        if self.exhausted {
            return;
        }
        if frontier.is_empty() {
            let better = match &self.best {
                None => true,
                Some((obj, _)) => current < *obj,
            };
            if better {
                self.best = Some((current, self.assignment.clone()));
            }
            return;
        }

        // Decide the open task with the largest minimum energy (ties: lowest
        // task index) so the bound bites early.
        let pick = frontier
            .iter()
            .enumerate()
            .max_by_key(|(_, o)| (self.min_energy[o.task], std::cmp::Reverse(o.task)))
            .map(|(i, _)| i)
            .expect("frontier not empty");
        // Order-preserving removal: the truncate below relies on every
        // recursive call leaving the frontier exactly as it found it, so the
        // children pushed here are still the trailing entries.
        let open = frontier.remove(pick);
        let rest_bound: i64 = frontier
            .iter()
            .map(|o| self.min_energy[o.task])
            .fold(0i64, i64::saturating_add);

        for idx in 0..self.choices[open.task].len() {
            let (energy, s, h) = self.choices[open.task][idx];
            if let Some((best_obj, _)) = &self.best {
                if current.saturating_add(energy).saturating_add(rest_bound) >= *best_obj {
                    break; // ascending energies: nothing later can improve
                }
            }
            let within = self.c.impls[s].within_type;
            if !open.masks.iter().all(|m| m[within]) {
                continue;
            }
            let req = self.c.impls[s].req_milli;
            if !(0..4).all(|k| self.remaining[h][k] >= req[k]) {
                continue;
            }
            if self.nodes >= self.budget {
                self.exhausted = true;
                break;
            }
            self.nodes += 1;

            for k in 0..4 {
                self.remaining[h][k] -= req[k];
            }
            self.assignment[open.task] = Some((s, h));
            let pushed = self.push_children(frontier, open.task, s);
            self.dfs(frontier, current + energy);
            frontier.truncate(frontier.len() - pushed);
            self.assignment[open.task] = None;
            for k in 0..4 {
                self.remaining[h][k] += req[k];
            }
            if self.exhausted {
                break;
            }
        }
        frontier.insert(pick, open);
    }

    /// Activate the children the chosen implementation requires; a child
    /// required by several sub-requirements gets all their masks.
    fn push_children(&self, frontier: &mut Vec<Open<'a>>, task: usize, s: usize) -> usize {
        let t = &self.c.tasks[task];
        let mut pushed = 0;
        for sub in &self.c.impls[s].requires {
            let slot = t.children[t.child_of_type[&sub.child_type]];
            let skip_from = frontier.len() - pushed;
            if let Some(existing) = frontier.iter_mut().skip(skip_from).find(|o| o.task == slot) {
                existing.masks.push(&sub.compat);
            } else {
                frontier.push(Open {
                    task: slot,
                    masks: vec![&sub.compat],
                });
                pushed += 1;
            }
        }
        pushed
    }
}
