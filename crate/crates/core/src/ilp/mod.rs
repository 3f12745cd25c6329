//! Integer-linear-program view of a scenario, plus a small exact solver.
//!
//! The builder lists every (task, compatible implementation, hardware)
//! combination as a binary variable — this exhaustive enumeration is exactly
//! what makes model generation expensive on large hardware counts — and
//! encodes: per-root-task assignment, child activation balance, capacity
//! rows per (hardware, resource kind), and sub-requirement linking rows.
//! NFP windows prune incompatible implementations before variables are
//! created, so no window rows are needed.

mod enumerate;
mod exact;
mod export;

pub use enumerate::{count_complete_assignments, enumerate_best};
pub use exact::{exact_solve, exact_solve_compiled, ExactError, ExactSolution};
pub use export::{export_lp, export_lp_string};

use crate::clock::{ClockMode, PhaseTimer};
use crate::model::{Compiled, Scenario, ScenarioError};

/// One binary decision: task `task` served by implementation `impl_idx`
/// (global index) on hardware `hw`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpVar {
    pub name: String,
    pub task: usize,
    pub impl_idx: usize,
    pub hw: usize,
    pub energy_micro: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
}

/// One constraint row: Σ coeff·var  (≤ | =)  rhs. Coefficients and the
/// right-hand side are in milli-units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpRow {
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub sense: RowSense,
    pub rhs_milli: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub name: String,
    pub vars: Vec<IlpVar>,
    pub rows: Vec<IlpRow>,
}

impl IlpModel {
    pub fn variable_count(&self) -> usize {
        self.vars.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Capacity rows count (one per hardware component and resource kind
    /// with at least one consuming variable).
    pub fn capacity_row_count(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.name.starts_with("cap_"))
            .count()
    }
}

/// Predicted variable count without building: Σ over tasks of
/// |window-compatible implementations| · |hardware|.
pub fn predicted_variable_count(c: &Compiled) -> u64 {
    c.tasks
        .iter()
        .map(|t| t.compat_impls.len() as u64 * c.hw.len() as u64)
        .sum()
}

/// Build the ILP on the wall clock. Returns the model and the measured
/// generation time in seconds.
pub fn build_ilp(scenario: &Scenario) -> Result<(IlpModel, f64), ScenarioError> {
    build_ilp_with_clock(scenario, ClockMode::Wall)
}

pub fn build_ilp_with_clock(
    scenario: &Scenario,
    clock: ClockMode,
) -> Result<(IlpModel, f64), ScenarioError> {
    let compiled = Compiled::new(scenario)?;
    Ok(build_ilp_compiled(&compiled, clock))
}

pub fn build_ilp_compiled(c: &Compiled, clock: ClockMode) -> (IlpModel, f64) {
    let mut timer = PhaseTimer::start(clock);
    let mut vars: Vec<IlpVar> = Vec::new();
    let mut rows: Vec<IlpRow> = Vec::new();
    // Variable indices per task, and per (task, impl) the h-range start.
    let mut task_vars: Vec<std::ops::Range<usize>> = Vec::with_capacity(c.tasks.len());

    for (t, task) in c.tasks.iter().enumerate() {
        let start = vars.len();
        for &s in &task.compat_impls {
            for h in 0..c.hw.len() {
                vars.push(IlpVar {
                    name: format!("x_t{t}_s{s}_h{h}"),
                    task: t,
                    impl_idx: s,
                    hw: h,
                    energy_micro: c.energy_micro(s, h),
                });
            }
        }
        timer.add_ops((vars.len() - start) as u64);
        task_vars.push(start..vars.len());
    }

    // Per root task: exactly one (implementation, hardware).
    for (t, task) in c.tasks.iter().enumerate() {
        if task.parent.is_some() {
            continue;
        }
        let terms: Vec<(usize, i64)> = task_vars[t].clone().map(|v| (v, 1000)).collect();
        timer.add_ops(terms.len() as u64);
        rows.push(IlpRow {
            name: format!("assign_t{t}"),
            terms,
            sense: RowSense::Eq,
            rhs_milli: 1000,
        });
    }

    // Per child task: activation balance — the child picks a pair exactly as
    // often as some parent variable requiring its type is set.
    for (t, task) in c.tasks.iter().enumerate() {
        let Some(p) = task.parent else { continue };
        let mut terms: Vec<(usize, i64)> = task_vars[t].clone().map(|v| (v, 1000)).collect();
        for v in task_vars[p].clone() {
            let parent_impl = vars[v].impl_idx;
            if c.impls[parent_impl]
                .requires
                .iter()
                .any(|sub| sub.child_type == task.type_idx)
            {
                terms.push((v, -1000));
            }
        }
        timer.add_ops(terms.len() as u64);
        rows.push(IlpRow {
            name: format!("act_t{t}"),
            terms,
            sense: RowSense::Eq,
            rhs_milli: 0,
        });
    }

    // Sub-requirement linking: choosing implementation s at task t forces the
    // required child slot to choose some implementation inside the
    // sub-requirement's NFP window.
    for (t, task) in c.tasks.iter().enumerate() {
        for &s in &task.compat_impls {
            for (j, sub) in c.impls[s].requires.iter().enumerate() {
                let ct = task.children[task.child_of_type[&sub.child_type]];
                let mut terms: Vec<(usize, i64)> = task_vars[t]
                    .clone()
                    .filter(|&v| vars[v].impl_idx == s)
                    .map(|v| (v, 1000))
                    .collect();
                for v in task_vars[ct].clone() {
                    let within = c.impls[vars[v].impl_idx].within_type;
                    if sub.compat[within] {
                        terms.push((v, -1000));
                    }
                }
                timer.add_ops(terms.len() as u64);
                rows.push(IlpRow {
                    name: format!("link_t{t}_s{s}_r{j}"),
                    terms,
                    sense: RowSense::Le,
                    rhs_milli: 0,
                });
            }
        }
    }

    // Capacity per (hardware, resource kind).
    for h in 0..c.hw.len() {
        for k in 0..4 {
            let mut terms: Vec<(usize, i64)> = Vec::new();
            for (v, var) in vars.iter().enumerate() {
                if var.hw == h {
                    let req = c.impls[var.impl_idx].req_milli[k];
                    if req != 0 {
                        terms.push((v, req));
                    }
                }
            }
            if terms.is_empty() {
                continue;
            }
            timer.add_ops(terms.len() as u64);
            rows.push(IlpRow {
                name: format!("cap_h{h}_{}", crate::model::RESOURCE_KINDS[k].name()),
                terms,
                sense: RowSense::Le,
                rhs_milli: c.hw[h].cap_milli[k],
            });
        }
    }

    let model = IlpModel {
        name: format!("qmap_{}", sanitize(&cname(c))),
        vars,
        rows,
    };
    let seconds = timer.stop();
    (model, seconds)
}

fn cname(c: &Compiled) -> String {
    if c.requests.is_empty() {
        "empty".to_string()
    } else {
        format!("{}req_{}hw", c.requests.len(), c.hw.len())
    }
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '_' })
        .collect()
}
