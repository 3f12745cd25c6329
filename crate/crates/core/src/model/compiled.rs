//! Indexed, quantized view of a [`Scenario`]: integer resource/energy units,
//! the worst-case task tree per request, and precomputed compatibility tables.
//!
//! Quantities and capacities are held in milli-units (`i64`), so pairwise
//! energy products land in micro-units. All downstream scoring is exact
//! integer arithmetic, which keeps incremental score maintenance reversible.

use super::{window_satisfied, NfpMap, Scenario, ScenarioError};
use std::collections::BTreeMap;

/// Milli-unit quantization for resource quantities and capacities.
pub fn milli(x: f64) -> i64 {
    (x * 1000.0).round() as i64
}

#[derive(Debug, Clone)]
pub struct CompiledImpl {
    pub id: String,
    pub type_idx: usize,
    /// Position among the implementations of its own type.
    pub within_type: usize,
    pub req_milli: [i64; 4],
    pub provides: NfpMap,
    pub requires: Vec<CompiledSubReq>,
}

#[derive(Debug, Clone)]
pub struct CompiledSubReq {
    pub child_type: usize,
    pub nfp_min: NfpMap,
    pub nfp_max: NfpMap,
    /// `compat[j]` = does implementation `j` of `child_type` (within-type
    /// index) satisfy this sub-requirement's NFP window?
    pub compat: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct CompiledHw {
    pub id: String,
    pub cap_milli: [i64; 4],
    pub coeff_milli: [i64; 4],
}

#[derive(Debug, Clone)]
pub struct CompiledRequest {
    pub id: String,
    pub target_type: usize,
    /// Root task index of this request.
    pub root_task: usize,
}

/// One node of a request's worst-case requirement tree: the slot a component
/// assignment occupies. Tasks are laid out contiguously per request, parents
/// before children.
#[derive(Debug, Clone)]
pub struct Task {
    pub request: usize,
    pub parent: Option<usize>,
    pub type_idx: usize,
    /// Child ordinals from the root, e.g. `[]` for roots, `[1, 0]` for the
    /// first child of the second child of the root.
    pub slot_path: Vec<usize>,
    /// NFP window propagated from above: the request window for roots, the
    /// union (relaxed) window over all parent-type implementations otherwise.
    pub nfp_min: NfpMap,
    pub nfp_max: NfpMap,
    /// Child task indices, ordered by within-parent ordinal.
    pub children: Vec<usize>,
    /// Child type index -> ordinal in `children`.
    pub child_of_type: BTreeMap<usize, usize>,
    /// Global implementation indices of this task's type whose provided NFPs
    /// pass the propagated window.
    pub compat_impls: Vec<usize>,
    /// Same compatibility, indexed by within-type implementation position.
    pub compat_within: Vec<bool>,
}

/// Fully indexed scenario, ready for scoring and model building.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub type_ids: Vec<String>,
    pub impls: Vec<CompiledImpl>,
    /// Global implementation indices per type, in scenario order.
    pub impls_of_type: Vec<Vec<usize>>,
    pub hw: Vec<CompiledHw>,
    pub requests: Vec<CompiledRequest>,
    pub tasks: Vec<Task>,
    /// Sorted union of required child types per type, over all of the type's
    /// implementations. This is the worst-case fan-out used to size the pool.
    pub union_children: Vec<Vec<usize>>,
}

impl Compiled {
    pub fn new(scenario: &Scenario) -> Result<Self, ScenarioError> {
        scenario.validate()?;

        let type_ids: Vec<String> = scenario
            .component_types
            .iter()
            .map(|t| t.id.clone())
            .collect();
        let type_idx: BTreeMap<&str, usize> = type_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();

        let mut impls_of_type: Vec<Vec<usize>> = vec![Vec::new(); type_ids.len()];
        let mut impls: Vec<CompiledImpl> = Vec::with_capacity(scenario.implementations.len());
        for im in &scenario.implementations {
            let t = type_idx[im.of_type.as_str()];
            let within_type = impls_of_type[t].len();
            impls_of_type[t].push(impls.len());
            impls.push(CompiledImpl {
                id: im.id.clone(),
                type_idx: t,
                within_type,
                req_milli: [
                    milli(im.resource_req.0[0]),
                    milli(im.resource_req.0[1]),
                    milli(im.resource_req.0[2]),
                    milli(im.resource_req.0[3]),
                ],
                provides: im.provides.clone(),
                requires: Vec::new(),
            });
        }
        // Fill sub-requirements once within-type indexing exists.
        for (gi, im) in scenario.implementations.iter().enumerate() {
            let mut requires = Vec::with_capacity(im.requires.len());
            for sub in &im.requires {
                let child_type = type_idx[sub.required_type.as_str()];
                let compat = impls_of_type[child_type]
                    .iter()
                    .map(|&j| window_satisfied(&impls[j].provides, &sub.nfp_min, &sub.nfp_max))
                    .collect();
                requires.push(CompiledSubReq {
                    child_type,
                    nfp_min: sub.nfp_min.clone(),
                    nfp_max: sub.nfp_max.clone(),
                    compat,
                });
            }
            impls[gi].requires = requires;
        }

        let hw = scenario
            .hardware
            .iter()
            .map(|h| CompiledHw {
                id: h.id.clone(),
                cap_milli: [
                    milli(h.capacities.0[0]),
                    milli(h.capacities.0[1]),
                    milli(h.capacities.0[2]),
                    milli(h.capacities.0[3]),
                ],
                coeff_milli: [
                    milli(h.energy_coeff.0[0]),
                    milli(h.energy_coeff.0[1]),
                    milli(h.energy_coeff.0[2]),
                    milli(h.energy_coeff.0[3]),
                ],
            })
            .collect();

        let union_children = union_children(&type_ids, &impls, &impls_of_type);
        check_acyclic(&type_ids, &union_children)?;

        // Relaxed windows per (parent type, child type): a bound applies only
        // if every sub-requirement window on that child carries it.
        let relaxed = relaxed_windows(&impls, &impls_of_type, type_ids.len());

        let mut tasks: Vec<Task> = Vec::new();
        let mut requests = Vec::with_capacity(scenario.requests.len());
        for (ri, r) in scenario.requests.iter().enumerate() {
            let target_type = type_idx[r.target.as_str()];
            let root_task = tasks.len();
            build_task_subtree(
                &mut tasks,
                ri,
                None,
                target_type,
                Vec::new(),
                r.nfp_min.clone(),
                r.nfp_max.clone(),
                &union_children,
                &relaxed,
                &impls,
                &impls_of_type,
            );
            requests.push(CompiledRequest {
                id: r.id.clone(),
                target_type,
                root_task,
            });
        }

        Ok(Compiled {
            type_ids,
            impls,
            impls_of_type,
            hw,
            requests,
            tasks,
            union_children,
        })
    }

    /// Energy (micro-units) of running `impl_idx` on `hw_idx`:
    /// dot product of resource demand and the hardware energy coefficients.
    pub fn energy_micro(&self, impl_idx: usize, hw_idx: usize) -> i64 {
        let req = &self.impls[impl_idx].req_milli;
        let coeff = &self.hw[hw_idx].coeff_milli;
        req[0] * coeff[0] + req[1] * coeff[1] + req[2] * coeff[2] + req[3] * coeff[3]
    }

    /// Tasks of one request, in slot order (contiguous range).
    pub fn request_tasks(&self, request: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.requests[request].root_task;
        let end = self
            .requests
            .get(request + 1)
            .map(|r| r.root_task)
            .unwrap_or(self.tasks.len());
        start..end
    }
}

fn union_children(
    type_ids: &[String],
    impls: &[CompiledImpl],
    impls_of_type: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); type_ids.len()];
    for (t, out_t) in out.iter_mut().enumerate() {
        let mut set: Vec<usize> = impls_of_type[t]
            .iter()
            .flat_map(|&i| impls[i].requires.iter().map(|s| s.child_type))
            .collect();
        set.sort_unstable();
        set.dedup();
        *out_t = set;
    }
    out
}

fn check_acyclic(type_ids: &[String], union_children: &[Vec<usize>]) -> Result<(), ScenarioError> {
    // 0 = unvisited, 1 = on stack, 2 = done.
    fn visit(
        t: usize,
        state: &mut [u8],
        union_children: &[Vec<usize>],
        type_ids: &[String],
    ) -> Result<(), ScenarioError> {
        match state[t] {
            1 => return Err(ScenarioError::CyclicRequirements(type_ids[t].clone())),
            2 => return Ok(()),
            _ => {}
        }
        state[t] = 1;
        for &c in &union_children[t] {
            visit(c, state, union_children, type_ids)?;
        }
        state[t] = 2;
        Ok(())
    }
    let mut state = vec![0u8; type_ids.len()];
    for t in 0..type_ids.len() {
        visit(t, &mut state, union_children, type_ids)?;
    }
    Ok(())
}

type Window = (NfpMap, NfpMap);

/// For each (parent type, child type) pair that occurs in some
/// sub-requirement, the loosest window any child implementation must pass to
/// be usable somewhere under that parent type.
fn relaxed_windows(
    impls: &[CompiledImpl],
    impls_of_type: &[Vec<usize>],
    type_count: usize,
) -> BTreeMap<(usize, usize), Window> {
    let mut out = BTreeMap::new();
    for parent_type in 0..type_count {
        let mut windows: BTreeMap<usize, Vec<&CompiledSubReq>> = BTreeMap::new();
        for &i in &impls_of_type[parent_type] {
            for sub in &impls[i].requires {
                windows.entry(sub.child_type).or_default().push(sub);
            }
        }
        for (child_type, subs) in windows {
            let mut min = NfpMap::new();
            let mut max = NfpMap::new();
            // A lower bound survives only if present in every window; the
            // relaxed bound is then the loosest (minimum) of them. Upper
            // bounds mirror this with the maximum.
            for (pos, sub) in subs.iter().enumerate() {
                if pos == 0 {
                    min = sub.nfp_min.clone();
                    max = sub.nfp_max.clone();
                } else {
                    min.retain(|k, lo| {
                        if let Some(other) = sub.nfp_min.get(k) {
                            if *other < *lo {
                                *lo = *other;
                            }
                            true
                        } else {
                            false
                        }
                    });
                    max.retain(|k, hi| {
                        if let Some(other) = sub.nfp_max.get(k) {
                            if *other > *hi {
                                *hi = *other;
                            }
                            true
                        } else {
                            false
                        }
                    });
                }
            }
            out.insert((parent_type, child_type), (min, max));
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn build_task_subtree(
    tasks: &mut Vec<Task>,
    request: usize,
    parent: Option<usize>,
    type_idx: usize,
    slot_path: Vec<usize>,
    nfp_min: NfpMap,
    nfp_max: NfpMap,
    union_children: &[Vec<usize>],
    relaxed: &BTreeMap<(usize, usize), Window>,
    impls: &[CompiledImpl],
    impls_of_type: &[Vec<usize>],
) -> usize {
    let me = tasks.len();
    let compat_within: Vec<bool> = impls_of_type[type_idx]
        .iter()
        .map(|&i| window_satisfied(&impls[i].provides, &nfp_min, &nfp_max))
        .collect();
    let compat_impls = impls_of_type[type_idx]
        .iter()
        .zip(&compat_within)
        .filter(|&(_, &ok)| ok)
        .map(|(&i, _)| i)
        .collect();
    tasks.push(Task {
        request,
        parent,
        type_idx,
        slot_path: slot_path.clone(),
        nfp_min,
        nfp_max,
        children: Vec::new(),
        child_of_type: BTreeMap::new(),
        compat_impls,
        compat_within,
    });
    for (ordinal, &child_type) in union_children[type_idx].iter().enumerate() {
        let (min, max) = relaxed
            .get(&(type_idx, child_type))
            .cloned()
            .unwrap_or_default();
        let mut child_path = slot_path.clone();
        child_path.push(ordinal);
        let child = build_task_subtree(
            tasks,
            request,
            Some(me),
            child_type,
            child_path,
            min,
            max,
            union_children,
            relaxed,
            impls,
            impls_of_type,
        );
        tasks[me].children.push(child);
        tasks[me].child_of_type.insert(child_type, ordinal);
    }
    me
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        ComponentType, HardwareComponent, Implementation, Request, ResourceMap, ScenarioMeta,
        SubRequirement,
    };

    fn ct(id: &str) -> ComponentType {
        ComponentType {
            id: id.to_string(),
            name: id.to_string(),
        }
    }

    fn imp(id: &str, of: &str, requires: Vec<SubRequirement>) -> Implementation {
        Implementation {
            id: id.to_string(),
            of_type: of.to_string(),
            provides: NfpMap::new(),
            resource_req: ResourceMap([1.0, 1.0, 1.0, 1.0]),
            requires,
        }
    }

    fn sub(ty: &str) -> SubRequirement {
        SubRequirement {
            required_type: ty.to_string(),
            nfp_min: NfpMap::new(),
            nfp_max: NfpMap::new(),
        }
    }

    fn hw(id: &str) -> HardwareComponent {
        HardwareComponent {
            id: id.to_string(),
            capacities: ResourceMap([10.0, 10.0, 10.0, 10.0]),
            energy_coeff: ResourceMap([1.0, 1.0, 1.0, 1.0]),
        }
    }

    /// Type A has two implementations: one requiring {B}, one requiring
    /// {B, C}. The worst-case tree under A must cover the union {B, C}:
    /// with leaf types B and C that is three slots per request.
    #[test]
    fn worst_case_tree_unions_requirements_across_implementations() {
        let s = Scenario {
            meta: ScenarioMeta::default(),
            component_types: vec![ct("A"), ct("B"), ct("C")],
            implementations: vec![
                imp("a1", "A", vec![sub("B")]),
                imp("a2", "A", vec![sub("B"), sub("C")]),
                imp("b1", "B", vec![]),
                imp("c1", "C", vec![]),
            ],
            hardware: vec![hw("h0")],
            requests: vec![Request {
                id: "r0".to_string(),
                target: "A".to_string(),
                nfp_min: NfpMap::new(),
                nfp_max: NfpMap::new(),
            }],
        };
        let c = Compiled::new(&s).unwrap();
        assert_eq!(c.tasks.len(), 3);
        let root = &c.tasks[c.requests[0].root_task];
        assert_eq!(root.children.len(), 2);
    }

    #[test]
    fn cyclic_requirements_are_rejected() {
        let s = Scenario {
            meta: ScenarioMeta::default(),
            component_types: vec![ct("A"), ct("B")],
            implementations: vec![
                imp("a1", "A", vec![sub("B")]),
                imp("b1", "B", vec![sub("A")]),
            ],
            hardware: vec![hw("h0")],
            requests: vec![],
        };
        assert!(matches!(
            Compiled::new(&s),
            Err(ScenarioError::CyclicRequirements(_))
        ));
    }

    #[test]
    fn energy_is_exact_integer_microunits() {
        let s = Scenario {
            meta: ScenarioMeta::default(),
            component_types: vec![ct("A")],
            implementations: vec![Implementation {
                id: "a1".to_string(),
                of_type: "A".to_string(),
                provides: NfpMap::new(),
                resource_req: ResourceMap([0.5, 1.25, 0.0, 2.0]),
                requires: vec![],
            }],
            hardware: vec![HardwareComponent {
                id: "h0".to_string(),
                capacities: ResourceMap([4.0, 4.0, 4.0, 4.0]),
                energy_coeff: ResourceMap([2.0, 1.0, 3.0, 0.5]),
            }],
            requests: vec![Request {
                id: "r0".to_string(),
                target: "A".to_string(),
                nfp_min: NfpMap::new(),
                nfp_max: NfpMap::new(),
            }],
        };
        let c = Compiled::new(&s).unwrap();
        // 0.5 * 2 + 1.25 * 1 + 0 * 3 + 2 * 0.5 = 3.25 units = 3_250_000 micro.
        assert_eq!(c.energy_micro(0, 0), 3_250_000);
    }

    /// A bound on a child window survives relaxation only when every parent
    /// implementation's window carries it, and the loosest value wins.
    #[test]
    fn relaxed_child_window_takes_loosest_bounds() {
        let mut s1 = sub("B");
        s1.nfp_min.insert("res".to_string(), 30.0);
        let mut s2 = sub("B");
        s2.nfp_min.insert("res".to_string(), 50.0);
        let s = Scenario {
            meta: ScenarioMeta::default(),
            component_types: vec![ct("A"), ct("B")],
            implementations: vec![
                imp("a1", "A", vec![s1]),
                imp("a2", "A", vec![s2]),
                imp("b1", "B", vec![]),
            ],
            hardware: vec![hw("h0")],
            requests: vec![Request {
                id: "r0".to_string(),
                target: "A".to_string(),
                nfp_min: NfpMap::new(),
                nfp_max: NfpMap::new(),
            }],
        };
        let c = Compiled::new(&s).unwrap();
        let child = &c.tasks[1];
        assert_eq!(child.nfp_min.get("res"), Some(&30.0));
        assert!(child.nfp_max.is_empty());
    }
}
