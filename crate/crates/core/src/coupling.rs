//! Patch-edge values by Lagrange interpolation of macro node values.
//!
//! The macro node list is split into regions at meso-patches: a meso-patch's
//! left node closes one region and its right node opens the next, so no
//! interpolant ever spans a shock. Within a region each query takes the
//! `2*gamma + 1` consecutive nodes centred on the querying node, clipped at
//! the ends of the region. Clipping lowers the interpolation degree next to
//! boundaries and meso-patches but keeps the coupling bandwidth fixed.

use std::ops::RangeInclusive;

use crate::conditions::End;
use crate::error::{Error, Result};
use crate::geometry::{macro_view_into, MacroNode, NodeSide, PatchKind, PatchSystem};

/// Lagrange weights of `xs` at `x`, written into `w`.
pub fn lagrange_weights(xs: &[f64], x: f64, w: &mut [f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("interpolation needs at least one node".into()));
    }
    for (k, &xk) in xs.iter().enumerate() {
        let mut p = 1.0;
        for (l, &xl) in xs.iter().enumerate() {
            if l != k {
                if xk == xl {
                    return Err(Error::DuplicateNode(xk));
                }
                p *= (x - xl) / (xk - xl);
            }
        }
        w[k] = p;
    }
    Ok(())
}

/// `sum_k U_k prod_{l != k} (x - X_l) / (X_k - X_l)`.
pub fn lagrange_value(nodes: &[(f64, f64)], x: f64) -> Result<f64> {
    let xs: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let mut w = vec![0.0; xs.len()];
    lagrange_weights(&xs, x, &mut w)?;
    Ok(nodes.iter().zip(&w).map(|(n, w)| n.1 * w).sum())
}

/// Contiguous macro-node index ranges separated at meso-patches.
pub fn regions(nodes: &[MacroNode]) -> Vec<RangeInclusive<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (q, node) in nodes.iter().enumerate() {
        match node.side {
            NodeSide::Left => {
                out.push(start..=q);
            }
            NodeSide::Right => start = q,
            NodeSide::Centre => {}
        }
    }
    if let Some(last) = nodes.len().checked_sub(1) {
        if nodes[last].side != NodeSide::Left {
            out.push(start..=last);
        }
    }
    out
}

/// Nodes `q - gamma ..= q + gamma`, clipped to `region`.
pub fn stencil(q: usize, gamma: usize, region: &RangeInclusive<usize>) -> RangeInclusive<usize> {
    let lo = q.saturating_sub(gamma).max(*region.start());
    let hi = (q + gamma).min(*region.end());
    lo..=hi
}

/// Querying node of edge `end` of patch `j`, as an index into the macro view.
fn query_node(nodes: &[MacroNode], first_node: &[usize], system: &PatchSystem, j: usize, end: End) -> usize {
    let q = first_node[j];
    match (system.patches[j].kind, end) {
        (PatchKind::Meso, End::Right) => q + 1,
        _ => {
            debug_assert_eq!(nodes[q].patch, j);
            q
        }
    }
}

fn build_first_node(nodes: &[MacroNode], count: usize) -> Vec<usize> {
    let mut first = vec![usize::MAX; count];
    for (q, node) in nodes.iter().enumerate().rev() {
        first[node.patch] = q;
    }
    first
}

/// Neighbour set of edge `end` of patch `j`: `(patch index, side)` pairs in
/// increasing position.
pub fn neighbor_set(j: usize, end: End, system: &PatchSystem) -> Result<Vec<(usize, NodeSide)>> {
    if j >= system.len() {
        return Err(Error::InvalidParameter(format!("patch index {j} out of range")));
    }
    let mut nodes = Vec::new();
    macro_view_into(system, &mut nodes);
    let first = build_first_node(&nodes, system.len());
    let regs = regions(&nodes);
    let q = query_node(&nodes, &first, system, j, end);
    let region = regs.iter().find(|r| r.contains(&q)).expect("every node lies in a region");
    let region = if nodes[q].side == NodeSide::Left {
        regs.iter().find(|r| *r.end() == q).unwrap()
    } else {
        region
    };
    let s = stencil(q, system.gamma, region);
    if s.clone().count() < 2 {
        return Err(Error::TooFewNodes { patch: j, available: s.count() });
    }
    Ok(s.map(|k| (nodes[k].patch, nodes[k].side)).collect())
}

/// Cached neighbour windows for every interpolated patch edge, valid until
/// the patch list changes (a merge).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingPlan {
    /// `[left, right]` stencil per patch; `None` for domain-boundary edges.
    pub edges: Vec<[Option<RangeInclusive<usize>>; 2]>,
    pub regions: Vec<RangeInclusive<usize>>,
    pub node_count: usize,
    pub max_stencil: usize,
}

impl CouplingPlan {
    pub fn new(system: &PatchSystem) -> Result<Self> {
        let mut nodes = Vec::new();
        macro_view_into(system, &mut nodes);
        for w in nodes.windows(2) {
            if !(w[1].x > w[0].x) {
                return Err(Error::NonMonotone(w[1].x));
            }
        }
        let first = build_first_node(&nodes, system.len());
        let regs = regions(&nodes);
        let mut edges = Vec::with_capacity(system.len());
        let mut max_stencil = 0;
        for j in 0..system.len() {
            let mut pair: [Option<RangeInclusive<usize>>; 2] = [None, None];
            for (slot, end) in [End::Left, End::Right].into_iter().enumerate() {
                if system.boundary_edge(j, end) {
                    continue;
                }
                let q = query_node(&nodes, &first, system, j, end);
                let region = regs
                    .iter()
                    .find(|r| if nodes[q].side == NodeSide::Left { *r.end() == q } else { r.contains(&q) })
                    .expect("every node lies in a region");
                let s = stencil(q, system.gamma, region);
                let count = s.clone().count();
                if count < 2 {
                    return Err(Error::TooFewNodes { patch: j, available: count });
                }
                max_stencil = max_stencil.max(count);
                pair[slot] = Some(s);
            }
            edges.push(pair);
        }
        Ok(Self { edges, regions: regs, node_count: nodes.len(), max_stencil })
    }
}

/// Scratch space reused across edge evaluations.
#[derive(Debug, Default, Clone)]
pub struct CouplingScratch {
    pub nodes: Vec<MacroNode>,
    xs: Vec<f64>,
    w: Vec<f64>,
}

/// Edge values `(left, right)` of every patch at time `t`.
pub fn compute_edge_values(system: &PatchSystem, plan: &CouplingPlan, t: f64) -> Result<Vec<(f64, f64)>> {
    let mut scratch = CouplingScratch::default();
    let mut out = vec![(0.0, 0.0); system.len()];
    edge_values_into(system, plan, t, &mut scratch, &mut out)?;
    Ok(out)
}

pub fn edge_values_into(
    system: &PatchSystem,
    plan: &CouplingPlan,
    t: f64,
    scratch: &mut CouplingScratch,
    out: &mut [(f64, f64)],
) -> Result<()> {
    macro_view_into(system, &mut scratch.nodes);
    let (a, b) = (system.domain.a, system.domain.b);
    for (j, p) in system.patches.iter().enumerate() {
        let mut vals = [0.0; 2];
        for (slot, end) in [End::Left, End::Right].into_iter().enumerate() {
            let x = if slot == 0 { p.left_edge() } else { p.right_edge() };
            vals[slot] = match &plan.edges[j][slot] {
                None => system.bc.value(end, if slot == 0 { a } else { b }, t),
                Some(s) => {
                    let nodes = &scratch.nodes[s.clone()];
                    scratch.xs.clear();
                    scratch.xs.extend(nodes.iter().map(|n| n.x));
                    scratch.w.resize(nodes.len(), 0.0);
                    lagrange_weights(&scratch.xs, x, &mut scratch.w)?;
                    nodes.iter().zip(&scratch.w).map(|(n, w)| n.u * w).sum()
                }
            };
        }
        out[j] = (vals[0], vals[1]);
    }
    Ok(())
}

/// Overwrites every patch's two edge values with the coupled values at `t`.
pub fn apply_edge_values(system: &mut PatchSystem, plan: &CouplingPlan, t: f64, scratch: &mut CouplingScratch, buf: &mut Vec<(f64, f64)>) -> Result<()> {
    buf.resize(system.len(), (0.0, 0.0));
    edge_values_into(system, plan, t, scratch, buf)?;
    for (p, &(l, r)) in system.patches.iter_mut().zip(buf.iter()) {
        let last = p.u.len() - 1;
        p.u[0] = l;
        p.u[last] = r;
    }
    Ok(())
}
