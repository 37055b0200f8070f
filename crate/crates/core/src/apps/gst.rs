//! Fractional group Steiner tree on a rooted tree, with a min-cut separation
//! oracle feeding the boxed LP solver.

use std::collections::{HashMap, VecDeque};

use serde::Deserialize;

use super::flow::{max_flow, FlowNetwork};
use crate::error::{Error, Result};
use crate::instance::{AdviceVector, ConstraintSource, SparseRow};
use crate::lp::{LpSolver, StepReport};
use crate::params::SolverParams;

/// Tree with edges oriented away from the root. Vertices are renumbered
/// densely; `ids` maps back to the input labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTreeInstance {
    pub ids: Vec<u64>,
    pub root: usize,
    /// `(parent, child)` per edge, in input order.
    pub edges: Vec<(usize, usize)>,
    pub costs: Vec<f64>,
}

#[derive(Deserialize)]
struct TreeDoc {
    root: u64,
    edges: Vec<(u64, u64, f64)>,
}

impl RootedTreeInstance {
    /// Builds a tree from undirected labelled edges `(u, v, cost)`.
    pub fn new(root: u64, edges: &[(u64, u64, f64)]) -> Result<Self> {
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut ids = Vec::new();
        let mut intern = |label: u64, ids: &mut Vec<u64>| {
            *index.entry(label).or_insert_with(|| {
                ids.push(label);
                ids.len() - 1
            })
        };
        let r = intern(root, &mut ids);
        let mut raw = Vec::with_capacity(edges.len());
        for (k, &(u, v, cost)) in edges.iter().enumerate() {
            if !(cost > 0.0 && cost.is_finite()) {
                return Err(Error::NonPositiveCost { index: k, value: cost });
            }
            raw.push((intern(u, &mut ids), intern(v, &mut ids)));
        }
        let nv = ids.len();
        if raw.len() + 1 != nv {
            return Err(Error::MalformedDocument(format!("{} edges on {nv} vertices is not a tree", raw.len())));
        }
        let mut adj = vec![Vec::new(); nv];
        for (k, &(u, v)) in raw.iter().enumerate() {
            adj[u].push((v, k));
            adj[v].push((u, k));
        }
        let mut parent_of_edge = vec![usize::MAX; raw.len()];
        let mut seen = vec![false; nv];
        seen[r] = true;
        let mut q = VecDeque::from([r]);
        while let Some(u) = q.pop_front() {
            for &(v, k) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent_of_edge[k] = u;
                    q.push_back(v);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedDocument("tree is not connected".into()));
        }
        let oriented = raw
            .iter()
            .zip(&parent_of_edge)
            .map(|(&(u, v), &p)| if p == u { (u, v) } else { (v, u) })
            .collect();
        Ok(Self { ids, root: r, edges: oriented, costs: edges.iter().map(|e| e.2).collect() })
    }

    pub fn vertices(&self) -> usize {
        self.ids.len()
    }

    /// Dense index of a vertex label.
    pub fn vertex(&self, label: u64) -> Option<usize> {
        self.ids.iter().position(|&l| l == label)
    }

    /// Converts labelled groups to dense vertex indices.
    pub fn groups_from_labels(&self, groups: &[Vec<u64>]) -> Result<Vec<Vec<usize>>> {
        groups
            .iter()
            .map(|g| {
                if g.is_empty() {
                    return Err(Error::MalformedDocument("empty group".into()));
                }
                g.iter()
                    .map(|&l| self.vertex(l).ok_or_else(|| Error::MalformedDocument(format!("unknown vertex {l}"))))
                    .collect()
            })
            .collect()
    }

    /// Max flow from the root to `group` under edge capacities `x`, with the
    /// group joined to a super-sink.
    pub fn flow_to_group(&self, group: &[usize], x: &[f64]) -> (f64, Vec<usize>) {
        let nv = self.vertices();
        let sink = nv;
        let mut net = FlowNetwork::new(nv + 1);
        for (&(p, c), &cap) in self.edges.iter().zip(x) {
            net.add_arc(p, c, cap.max(0.0));
        }
        let big = x.iter().map(|v| v.max(0.0)).sum::<f64>() + 1.0;
        for &g in group {
            net.add_arc(g, sink, big);
        }
        let mf = max_flow(&net, self.root, sink);
        let cut = mf.min_cut.into_iter().filter(|&a| a < self.edges.len()).collect();
        (mf.value, cut)
    }
}

pub fn parse_tree(text: &str) -> Result<RootedTreeInstance> {
    let doc: TreeDoc = serde_json::from_str(text)?;
    RootedTreeInstance::new(doc.root, &doc.edges)
}

/// Parses a JSON list of vertex-label lists.
pub fn parse_groups(text: &str) -> Result<Vec<Vec<u64>>> {
    Ok(serde_json::from_str(text)?)
}

/// A violated cut row for `group`, or `None` if it already receives unit flow.
pub fn gst_oracle(tree: &RootedTreeInstance, group: &[usize], x: &[f64], tol_feas: f64) -> Option<SparseRow> {
    if group.contains(&tree.root) {
        return None;
    }
    let (value, cut) = tree.flow_to_group(group, x);
    if value >= 1.0 - tol_feas {
        return None;
    }
    Some(SparseRow::indicator(cut))
}

#[derive(Debug, Clone)]
pub struct GstOutcome {
    pub x: Vec<f64>,
    pub cost: f64,
    pub reports: Vec<StepReport>,
    pub oracle_rows: usize,
}

/// Processes the groups in order, feeding min-cut rows until each group is
/// connected to the root by a unit flow.
pub fn solve_gst_online(
    tree: &RootedTreeInstance,
    groups: &[Vec<usize>],
    advice: &[f64],
    lambda: f64,
    params: SolverParams,
) -> Result<GstOutcome> {
    let adv = AdviceVector { x_prime: advice.to_vec(), lambda };
    let mut solver = LpSolver::online(tree.costs.clone(), true, &adv, params)?;
    let mut reports = Vec::new();
    for group in groups {
        let tol = params.tol_feas;
        let source = ConstraintSource::oracle(move |x: &[f64]| Ok(gst_oracle(tree, group, x, tol)));
        reports.extend(solver.process_source(source)?);
    }
    let x = solver.current_solution();
    Ok(GstOutcome { cost: solver.cost(), oracle_rows: reports.len(), reports, x })
}
