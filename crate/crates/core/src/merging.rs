//! Collision detection and the construction of merged meso-patches.
//!
//! Two patches whose edges touch become one meso-patch on the union of their
//! micro grids. The shared edge point becomes a new interior point carrying
//! the mean of the two edge values; everything else is copied unchanged.

use crate::error::{Error, Result};
use crate::geometry::{Patch, PatchKind, PatchSystem};

/// The adjacent pair with the smallest gap, lowest index on ties.
pub fn min_gap(system: &PatchSystem) -> Option<(usize, f64)> {
    min_gap_of(&system.patches)
}

pub fn min_gap_of(patches: &[Patch]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for s in 0..patches.len().saturating_sub(1) {
        let g = patches[s + 1].left_edge() - patches[s].right_edge();
        if best.map_or(true, |(_, b)| g < b) {
            best = Some((s, g));
        }
    }
    best
}

/// Moves the pair so their facing edges coincide exactly. A fixed patch
/// stays where it is; otherwise both meet at the midpoint. Returns the
/// contact coordinate.
pub fn snap_pair(left: &mut Patch, right: &mut Patch) -> f64 {
    let (hl, hr) = (left.half_width(), right.half_width());
    match (left.fixed, right.fixed) {
        (true, false) => {
            let x = left.right_edge();
            right.x0 = x + hr;
            x
        }
        (false, true) => {
            let x = right.left_edge();
            left.x0 = x - hl;
            x
        }
        _ if left.fixed => left.right_edge(),
        _ => {
            let x = 0.5 * (left.right_edge() + right.left_edge());
            left.x0 = x - hl;
            right.x0 = x + hr;
            x
        }
    }
}

/// Joins two touching patches into one meso-patch.
pub fn merge(left: &Patch, right: &Patch, kappa: usize) -> Result<Patch> {
    if left.n % kappa != 0 {
        return Err(Error::PeriodMismatch { n: left.n, kappa });
    }
    if right.n % kappa != 0 {
        return Err(Error::PeriodMismatch { n: right.n, kappa });
    }
    let d = left.d;
    let (xl, xr) = (left.right_edge(), right.left_edge());
    if (xl - xr).abs() > 1e-9 * d || (left.d - right.d).abs() > 1e-12 * d {
        return Err(Error::EdgesNotCoincident { left: xl, right: xr });
    }
    let (ns, nr) = (left.n, right.n);
    let n = ns + nr;
    let mut u = Vec::with_capacity(2 * n + 1);
    u.extend_from_slice(&left.u[..2 * ns]);
    u.push(0.5 * (left.u[2 * ns] + right.u[0]));
    u.extend_from_slice(&right.u[1..]);
    debug_assert_eq!(u.len(), 2 * n + 1);
    let node_l = match left.kind {
        PatchKind::Ordinary => 0,
        PatchKind::Meso => left.node_l,
    } - nr as isize;
    let node_r = match right.kind {
        PatchKind::Ordinary => 0,
        PatchKind::Meso => right.node_r,
    } + ns as isize;
    Ok(Patch {
        kind: PatchKind::Meso,
        x0: left.x0 + nr as f64 * d,
        n,
        d,
        u,
        node_l,
        node_r,
        fixed: left.fixed || right.fixed,
    })
}

/// Record of one merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeRecord {
    pub x: f64,
    pub s: usize,
    pub n_left: usize,
    pub n_right: usize,
}

/// Snaps and merges patches `s` and `s+1` in place; higher indices shift down by one.
pub fn merge_at(system: &mut PatchSystem, s: usize) -> Result<MergeRecord> {
    if s + 1 >= system.len() {
        return Err(Error::InvalidParameter(format!("no patch pair at index {s}")));
    }
    let (a, b) = system.patches.split_at_mut(s + 1);
    let x = snap_pair(&mut a[s], &mut b[0]);
    let merged = merge(&a[s], &b[0], system.profile.kappa)?;
    let record = MergeRecord { x, s, n_left: a[s].n, n_right: b[0].n };
    system.patches[s] = merged;
    system.patches.remove(s + 1);
    Ok(record)
}
