//! Patches, the ordered patch system, and initial layouts.

use serde::{Deserialize, Serialize};

use crate::conditions::{BoundaryCondition, End, InitialCondition};
use crate::error::{Error, Result};
use crate::heterogeneity::{patch_phase, HeterogeneityProfile};
use crate::lattice::MicroLattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchKind {
    Ordinary,
    Meso,
}

/// A rigid micro grid `x0 + d*i`, `i = -n..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub kind: PatchKind,
    pub x0: f64,
    pub n: usize,
    pub d: f64,
    /// Field values, `u[i + n]` at micro index `i`.
    pub u: Vec<f64>,
    pub node_l: isize,
    pub node_r: isize,
    /// Held in place (boundary patches, and meso-patches that absorbed one).
    pub fixed: bool,
}

impl Patch {
    pub fn ordinary(x0: f64, n: usize, d: f64, u: Vec<f64>) -> Self {
        debug_assert_eq!(u.len(), 2 * n + 1);
        Self { kind: PatchKind::Ordinary, x0, n, d, u, node_l: 0, node_r: 0, fixed: false }
    }

    pub fn meso(x0: f64, n: usize, d: f64, u: Vec<f64>, node_l: isize, node_r: isize) -> Self {
        debug_assert_eq!(u.len(), 2 * n + 1);
        Self { kind: PatchKind::Meso, x0, n, d, u, node_l, node_r, fixed: false }
    }

    #[inline]
    pub fn x(&self, i: isize) -> f64 {
        self.x0 + self.d * i as f64
    }

    #[inline]
    pub fn u_at(&self, i: isize) -> f64 {
        self.u[(i + self.n as isize) as usize]
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.n as f64 * self.d
    }

    #[inline]
    pub fn left_edge(&self) -> f64 {
        self.x(-(self.n as isize))
    }

    #[inline]
    pub fn right_edge(&self) -> f64 {
        self.x(self.n as isize)
    }

    pub fn points(&self) -> usize {
        2 * self.n + 1
    }

    pub fn interior(&self) -> &[f64] {
        &self.u[1..2 * self.n]
    }

    pub fn is_meso(&self) -> bool {
        self.kind == PatchKind::Meso
    }

    pub fn phase(&self, i: isize, kappa: usize) -> usize {
        patch_phase(kappa, i, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

impl Domain {
    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchSystem {
    pub patches: Vec<Patch>,
    pub domain: Domain,
    pub d: f64,
    /// Coupling half-width.
    pub gamma: usize,
    pub profile: HeterogeneityProfile,
    pub bc: BoundaryCondition,
    pub boundary_patches_fixed: bool,
}

impl PatchSystem {
    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn total_points(&self) -> usize {
        self.patches.iter().map(Patch::points).sum()
    }

    /// Fraction of the domain covered by patches.
    pub fn coverage(&self) -> f64 {
        self.patches.iter().map(|p| 2.0 * p.half_width()).sum::<f64>() / self.domain.length()
    }

    /// Whether the given edge of patch `j` sits on the domain boundary.
    pub fn boundary_edge(&self, j: usize, end: End) -> bool {
        let p = &self.patches[j];
        if !p.fixed {
            return false;
        }
        let tol = 1e-9 * self.d;
        match end {
            End::Left => j == 0 && (p.left_edge() - self.domain.a).abs() <= tol,
            End::Right => j + 1 == self.len() && (p.right_edge() - self.domain.b).abs() <= tol,
        }
    }

    /// Checks ordering, non-overlap and the period constraint.
    pub fn validate(&self) -> Result<()> {
        if self.patches.is_empty() {
            return Err(Error::InvalidParameter("patch system is empty".into()));
        }
        if self.gamma == 0 {
            return Err(Error::InvalidParameter("coupling order must be at least 1".into()));
        }
        let kappa = self.profile.kappa;
        for p in &self.patches {
            if p.n == 0 || p.n % kappa != 0 {
                return Err(Error::PeriodMismatch { n: p.n, kappa });
            }
            if p.u.len() != p.points() {
                return Err(Error::InvalidParameter(format!("patch with n = {} has {} values", p.n, p.u.len())));
            }
        }
        for j in 0..self.len().saturating_sub(1) {
            let gap = self.patches[j + 1].left_edge() - self.patches[j].right_edge();
            if gap < -1e-9 * self.d {
                return Err(Error::Overlap { left: j, right: j + 1, gap });
            }
        }
        let tol = 1e-9 * self.d;
        let first = &self.patches[0];
        let last = &self.patches[self.len() - 1];
        if first.left_edge() < self.domain.a - tol || last.right_edge() > self.domain.b + tol {
            return Err(Error::InvalidParameter("patches extend beyond the domain".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeSide {
    Centre,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroNode {
    pub x: f64,
    pub u: f64,
    pub patch: usize,
    pub side: NodeSide,
    /// Micro index of the node within its patch.
    pub index: isize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MacroView {
    pub nodes: Vec<MacroNode>,
}

impl MacroView {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// One node per ordinary patch, two per meso-patch, in increasing position.
pub fn macro_view(system: &PatchSystem) -> MacroView {
    let mut nodes = Vec::with_capacity(system.len() + 4);
    macro_view_into(system, &mut nodes);
    MacroView { nodes }
}

pub fn macro_view_into(system: &PatchSystem, nodes: &mut Vec<MacroNode>) {
    nodes.clear();
    for (j, p) in system.patches.iter().enumerate() {
        match p.kind {
            PatchKind::Ordinary => nodes.push(MacroNode { x: p.x0, u: p.u_at(0), patch: j, side: NodeSide::Centre, index: 0 }),
            PatchKind::Meso => {
                nodes.push(MacroNode { x: p.x(p.node_l), u: p.u_at(p.node_l), patch: j, side: NodeSide::Left, index: p.node_l });
                nodes.push(MacroNode { x: p.x(p.node_r), u: p.u_at(p.node_r), patch: j, side: NodeSide::Right, index: p.node_r });
            }
        }
    }
}

/// A meso-patch placed in the initial layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MesoPlacement {
    pub center: f64,
    pub n: usize,
    /// Node micro indices; default to `-/+ n/2` rounded to a multiple of kappa.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_l: Option<isize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_r: Option<isize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// Number of ordinary patches, including the two boundary patches.
    pub count: usize,
    pub n: usize,
    pub meso: Vec<MesoPlacement>,
    pub gamma: usize,
}

fn default_meso_node(n: usize, kappa: usize) -> isize {
    let half = n as f64 / 2.0;
    let k = kappa as f64;
    let idx = ((half / k).round() * k) as isize;
    idx.clamp(kappa as isize, (n - kappa).max(kappa) as isize)
}

/// Lays out `layout.count` ordinary patches evenly over the parts of the
/// domain not covered by meso-patches; the two outermost patches have their
/// outer edges on the domain boundary.
///
/// Every patch's left edge lies on a lattice point whose index is a multiple
/// of kappa, so patch phases agree with the absolute lattice at `t = 0`.
pub fn build_system(
    lattice: &MicroLattice,
    profile: &HeterogeneityProfile,
    layout: &Layout,
    ic: &InitialCondition,
    bc: &BoundaryCondition,
) -> Result<PatchSystem> {
    let kappa = profile.kappa;
    let d = lattice.d;
    let (a, b) = (lattice.a, lattice.b);
    let m_total = lattice.intervals as isize;
    if layout.count == 0 {
        return Err(Error::InvalidParameter("at least one ordinary patch is required".into()));
    }
    if layout.n == 0 || layout.n % kappa != 0 {
        return Err(Error::PeriodMismatch { n: layout.n, kappa });
    }
    let n = layout.n as isize;
    let snap_left = |left: f64| -> isize {
        let k = kappa as f64;
        (((left - a) / d / k).round() * k) as isize
    };

    // (left-edge lattice index, half count, kind)
    struct Slot {
        left: isize,
        n: usize,
        meso: Option<(isize, isize)>,
    }
    let mut slots: Vec<Slot> = Vec::new();

    let mut mesos: Vec<MesoPlacement> = layout.meso.clone();
    mesos.sort_by(|p, q| p.center.partial_cmp(&q.center).unwrap());
    let mut meso_iv: Vec<(f64, f64)> = Vec::new();
    for mp in &mesos {
        if mp.n == 0 || mp.n % kappa != 0 {
            return Err(Error::PeriodMismatch { n: mp.n, kappa });
        }
        let left = snap_left(mp.center - mp.n as f64 * d);
        let nl = mp.node_l.unwrap_or(-default_meso_node(mp.n, kappa));
        let nr = mp.node_r.unwrap_or(default_meso_node(mp.n, kappa));
        if !(nl < nr && nl > -(mp.n as isize) && nr < mp.n as isize) {
            return Err(Error::InvalidParameter(format!("meso node indices {nl}, {nr} invalid for n = {}", mp.n)));
        }
        meso_iv.push((a + left as f64 * d, a + (left + 2 * mp.n as isize) as f64 * d));
        slots.push(Slot { left, n: mp.n, meso: Some((nl, nr)) });
    }

    let h = n as f64 * d;
    if layout.count == 1 {
        if !mesos.is_empty() || 2 * n != m_total {
            return Err(Error::InvalidParameter("a single patch must span the whole domain exactly".into()));
        }
        slots.push(Slot { left: 0, n: layout.n, meso: None });
    } else {
        // free coordinate: the domain with meso intervals collapsed to points
        let widths: Vec<f64> = meso_iv.iter().map(|(l, r)| r - l).collect();
        let free = (b - a) - widths.iter().sum::<f64>();
        let mut collapse = Vec::with_capacity(meso_iv.len());
        let mut removed = 0.0;
        for ((l, _), w) in meso_iv.iter().zip(&widths) {
            collapse.push(l - a - removed);
            removed += w;
        }
        let spacing = (free - 2.0 * h) / (layout.count - 1) as f64;
        for i in 0..layout.count {
            let left = if i == 0 {
                0
            } else if i + 1 == layout.count {
                m_total - 2 * n
            } else {
                let mut s = h + spacing * i as f64;
                for &p in &collapse {
                    if s - h < p && p < s + h {
                        s = if s < p { p - h } else { p + h };
                    }
                }
                let shift: f64 = collapse.iter().zip(&widths).filter(|(&p, _)| p <= s - h + 1e-12).map(|(_, w)| w).sum();
                snap_left(a + s + shift - h)
            };
            slots.push(Slot { left, n: layout.n, meso: None });
        }
    }

    slots.sort_by_key(|s| s.left);
    let count = slots.len();
    let mut patches = Vec::with_capacity(count);
    for (j, s) in slots.iter().enumerate() {
        let centre = s.left + s.n as isize;
        let x0 = a + centre as f64 * d;
        let ns = s.n as isize;
        let u: Vec<f64> = (-ns..=ns)
            .map(|i| {
                let k = centre + i;
                let x = if k == m_total { b } else { a + k as f64 * d };
                ic.value(x)
            })
            .collect();
        let mut p = match s.meso {
            Some((nl, nr)) => Patch::meso(x0, s.n, d, u, nl, nr),
            None => Patch::ordinary(x0, s.n, d, u),
        };
        if j == 0 && s.left == 0 {
            p.fixed = true;
            p.u[0] = bc.value(End::Left, a, 0.0);
        }
        if j + 1 == count && s.left + 2 * ns == m_total {
            p.fixed = true;
            let last = p.u.len() - 1;
            p.u[last] = bc.value(End::Right, b, 0.0);
        }
        patches.push(p);
    }
    for j in 0..count.saturating_sub(1) {
        let right = slots[j].left + 2 * slots[j].n as isize;
        if right > slots[j + 1].left {
            let gap = (slots[j + 1].left - right) as f64 * d;
            return Err(Error::Overlap { left: j, right: j + 1, gap });
        }
    }
    if slots[0].left < 0 || slots[count - 1].left + 2 * slots[count - 1].n as isize > m_total {
        return Err(Error::InvalidParameter("patches extend beyond the domain".into()));
    }
    let system = PatchSystem {
        patches,
        domain: Domain { a, b },
        d,
        gamma: layout.gamma,
        profile: profile.clone(),
        bc: bc.clone(),
        boundary_patches_fixed: true,
    };
    system.validate()?;
    Ok(system)
}
