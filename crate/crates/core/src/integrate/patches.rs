//! Time integration of the coupled, moving patch system with merge events.

use crate::coupling::{apply_edge_values, CouplingPlan, CouplingScratch};
use crate::error::{Error, Result};
use crate::geometry::{macro_view_into, Patch, PatchSystem};
use crate::lattice::{default_dt_max, segment_rhs_into};
use crate::merging::{merge_at, min_gap_of};
use crate::motion::{advect_correction, patch_velocities, MotionParams};

use super::{Advance, Integrator, IntegratorConfig, OdeSystem};

/// Time derivative of the patch system: `du[j]` holds one entry per interior
/// point of patch `j`, `dx[j]` its rigid velocity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemDerivative {
    pub du: Vec<Vec<f64>>,
    pub dx: Vec<f64>,
}

impl SystemDerivative {
    pub fn for_system(system: &PatchSystem) -> Self {
        Self { du: system.patches.iter().map(|p| vec![0.0; 2 * p.n - 1]).collect(), dx: vec![0.0; system.len()] }
    }
}

#[derive(Debug, Default, Clone)]
struct Workspace {
    coupling: CouplingScratch,
    edges: Vec<(f64, f64)>,
}

fn rhs_with(
    system: &mut PatchSystem,
    t: f64,
    plan: &CouplingPlan,
    motion: &MotionParams,
    ws: &mut Workspace,
    du: &mut [&mut [f64]],
    dx: &mut [f64],
) -> Result<()> {
    apply_edge_values(system, plan, t, &mut ws.coupling, &mut ws.edges)?;
    macro_view_into(system, &mut ws.coupling.nodes);
    patch_velocities(system, &ws.coupling.nodes, &plan.regions, motion, dx)?;
    let stride = motion.advection_stride(system.profile.kappa);
    for (j, p) in system.patches.iter().enumerate() {
        segment_rhs_into(&p.u, p.d, &system.profile, 0, du[j]);
        advect_correction(&p.u, dx[j], p.d, stride, du[j]);
    }
    Ok(())
}

/// Sets every patch's edge values by coupling at time `t`, then evaluates
/// velocities and interior derivatives.
pub fn system_rhs(system: &mut PatchSystem, t: f64, plan: &CouplingPlan, motion: &MotionParams, out: &mut SystemDerivative) -> Result<()> {
    if out.du.len() != system.len() {
        *out = SystemDerivative::for_system(system);
    }
    let mut ws = Workspace::default();
    let mut du: Vec<&mut [f64]> = out.du.iter_mut().map(|v| v.as_mut_slice()).collect();
    rhs_with(system, t, plan, motion, &mut ws, &mut du, &mut out.dx)
}

/// The patch system as a flat ODE: interior values of every patch in order,
/// then one position per patch.
pub struct PatchOde {
    pub system: PatchSystem,
    pub plan: CouplingPlan,
    pub motion: MotionParams,
    ws: Workspace,
    offsets: Vec<usize>,
    interior_len: usize,
}

impl PatchOde {
    pub fn new(system: PatchSystem, motion: MotionParams) -> Result<Self> {
        system.validate()?;
        motion.validate()?;
        let plan = CouplingPlan::new(&system)?;
        let mut ode = Self { system, plan, motion, ws: Workspace::default(), offsets: Vec::new(), interior_len: 0 };
        ode.layout();
        Ok(ode)
    }

    fn layout(&mut self) {
        self.offsets.clear();
        let mut off = 0;
        for p in &self.system.patches {
            self.offsets.push(off);
            off += 2 * p.n - 1;
        }
        self.interior_len = off;
    }

    pub fn dim(&self) -> usize {
        self.interior_len + self.system.len()
    }

    pub fn pack(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.dim());
        for p in &self.system.patches {
            y.extend_from_slice(p.interior());
        }
        y.extend(self.system.patches.iter().map(|p| p.x0));
        y
    }

    pub fn unpack(&mut self, y: &[f64]) {
        let count = self.system.len();
        for (j, p) in self.system.patches.iter_mut().enumerate() {
            let off = self.offsets[j];
            let m = 2 * p.n - 1;
            p.u[1..=m].copy_from_slice(&y[off..off + m]);
            p.x0 = y[self.interior_len + j];
        }
        debug_assert_eq!(y.len(), self.interior_len + count);
    }

    /// Refreshes the edge values for the current state at time `t`.
    pub fn refresh_edges(&mut self, t: f64) -> Result<()> {
        apply_edge_values(&mut self.system, &self.plan, t, &mut self.ws.coupling, &mut self.ws.edges)
    }

    /// Merges the closest pair, rebuilds the coupling plan and state layout.
    pub fn merge_closest(&mut self, t: f64) -> Result<MergeEvent> {
        self.refresh_edges(t)?;
        let (s, _) = min_gap_of(&self.system.patches).ok_or_else(|| Error::InvalidParameter("nothing to merge".into()))?;
        let rec = merge_at(&mut self.system, s)?;
        self.plan = CouplingPlan::new(&self.system)?;
        self.layout();
        self.refresh_edges(t)?;
        Ok(MergeEvent { t, x: rec.x, s: rec.s, n_left: rec.n_left, n_right: rec.n_right })
    }

    fn gap_of(&self, y: &[f64]) -> f64 {
        let xs = &y[self.interior_len..];
        let p = &self.system.patches;
        let mut g = f64::INFINITY;
        for s in 0..p.len().saturating_sub(1) {
            let gs = (xs[s + 1] - p[s + 1].half_width()) - (xs[s] + p[s].half_width());
            g = g.min(gs);
        }
        g
    }
}

impl OdeSystem for PatchOde {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self.unpack(y);
        let (du_all, dx) = dy.split_at_mut(self.interior_len);
        let mut du: Vec<&mut [f64]> = Vec::with_capacity(self.system.len());
        let mut rest = du_all;
        for p in &self.system.patches {
            let (head, tail) = rest.split_at_mut(2 * p.n - 1);
            du.push(head);
            rest = tail;
        }
        rhs_with(&mut self.system, t, &self.plan, &self.motion, &mut self.ws, &mut du, dx)?;
        if dy.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(t));
        }
        Ok(())
    }

    fn event(&mut self, _t: f64, y: &[f64]) -> Option<f64> {
        if self.system.len() < 2 || !self.motion.moving {
            None
        } else {
            Some(self.gap_of(y))
        }
    }

    fn event_tolerance(&self) -> f64 {
        1e-10 * self.system.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub t: f64,
    pub x: f64,
    pub s: usize,
    pub n_left: usize,
    pub n_right: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchSnapshot {
    pub t: f64,
    pub patches: Vec<Patch>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchRun {
    pub snapshots: Vec<PatchSnapshot>,
    pub merges: Vec<MergeEvent>,
    pub steps: usize,
    pub rejected: usize,
}

/// Integrates the patch system to `t_end`, recording the state at every
/// time in `snapshots` (nondecreasing, within `[0, t_end]`) and at `t_end`.
pub fn run_patches(system: PatchSystem, motion: &MotionParams, t_end: f64, snapshots: &[f64], config: &IntegratorConfig) -> Result<PatchRun> {
    let dt_max = default_dt_max(system.d, &system.profile);
    let bounds = config.resolve(dt_max)?;
    let mut ode = PatchOde::new(system, motion.clone())?;
    let mut integrator = Integrator::new(bounds);
    let mut t = 0.0;
    let mut y = ode.pack();
    let mut targets: Vec<f64> = snapshots.iter().cloned().filter(|&s| s >= 0.0 && s <= t_end).collect();
    if targets.last().map_or(true, |&l| l < t_end) {
        targets.push(t_end);
    }
    let mut out = PatchRun { snapshots: Vec::with_capacity(targets.len()), merges: Vec::new(), steps: 0, rejected: 0 };
    for &target in &targets {
        loop {
            match integrator.advance_to(&mut ode, &mut t, &mut y, target)? {
                Advance::Reached => break,
                Advance::Event => {
                    ode.unpack(&y);
                    let ev = ode.merge_closest(t)?;
                    log::info!("merge at t = {:.6}, x = {:.6}: patches {} (n = {}) and {} (n = {})", ev.t, ev.x, ev.s, ev.n_left, ev.s + 1, ev.n_right);
                    out.merges.push(ev);
                    y = ode.pack();
                    integrator.reset();
                }
            }
        }
        ode.unpack(&y);
        ode.refresh_edges(t)?;
        out.snapshots.push(PatchSnapshot { t, patches: ode.system.patches.clone() });
    }
    out.steps = integrator.steps();
    out.rejected = integrator.rejected();
    log::debug!("patches: {} steps ({} rejected), {} merges", out.steps, out.rejected, out.merges.len());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::{BoundaryCondition, InitialCondition};
    use crate::geometry::{build_system, Layout};
    use crate::heterogeneity::HeterogeneityProfile;
    use crate::lattice::{FullDomainState, MicroLattice};

    fn profile() -> HeterogeneityProfile {
        HeterogeneityProfile::from_tables(vec![0.01, 0.02, 0.005], vec![0.8, 1.3, 0.9]).unwrap()
    }

    #[test]
    fn zero_is_fixed_point() {
        let lattice = MicroLattice::new(0.0, 1.0, 300).unwrap();
        let layout = Layout { count: 5, n: 6, meso: vec![], gamma: 2 };
        let mut sys = build_system(&lattice, &profile(), &layout, &InitialCondition::Zero, &BoundaryCondition::Zero).unwrap();
        let plan = CouplingPlan::new(&sys).unwrap();
        let mut der = SystemDerivative::default();
        system_rhs(&mut sys, 0.0, &plan, &MotionParams::new(1.0, 1.0), &mut der).unwrap();
        assert!(der.du.iter().flatten().all(|&v| v == 0.0));
        assert!(der.dx.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn single_patch_matches_full_domain() {
        let lattice = MicroLattice::new(0.0, 1.0, 60).unwrap();
        let ic = InitialCondition::sine(1.0, 3.0);
        let bc = BoundaryCondition::Constant { left: 0.2, right: -0.1 };
        let layout = Layout { count: 1, n: 30, meso: vec![], gamma: 1 };
        let mut sys = build_system(&lattice, &profile(), &layout, &ic, &bc).unwrap();
        let plan = CouplingPlan::new(&sys).unwrap();
        let mut der = SystemDerivative::default();
        system_rhs(&mut sys, 0.0, &plan, &MotionParams::new(1.0, 1.0), &mut der).unwrap();
        let full = FullDomainState::from_initial(lattice, profile(), &ic, bc);
        let want = full.rhs();
        assert_eq!(der.du[0].len(), want.len());
        for (a, b) in der.du[0].iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        assert_eq!(der.dx, vec![0.0]);
    }

    #[test]
    fn pack_round_trip() {
        let lattice = MicroLattice::new(0.0, 1.0, 300).unwrap();
        let layout = Layout { count: 4, n: 6, meso: vec![], gamma: 1 };
        let sys = build_system(&lattice, &profile(), &layout, &InitialCondition::sine(1.0, 2.0), &BoundaryCondition::Zero).unwrap();
        let mut ode = PatchOde::new(sys.clone(), MotionParams::new(1.0, 1.0)).unwrap();
        let y = ode.pack();
        assert_eq!(y.len(), 4 * 11 + 4);
        ode.unpack(&y);
        assert_eq!(ode.system, sys);
    }

    #[test]
    fn stationary_run_has_no_merges() {
        let lattice = MicroLattice::new(0.0, 1.0, 300).unwrap();
        let layout = Layout { count: 5, n: 6, meso: vec![], gamma: 2 };
        let sys = build_system(&lattice, &profile(), &layout, &InitialCondition::sine(0.5, std::f64::consts::PI), &BoundaryCondition::Zero).unwrap();
        let run = run_patches(sys.clone(), &MotionParams::stationary(), 0.05, &[0.01, 0.02], &IntegratorConfig::default()).unwrap();
        assert_eq!(run.snapshots.len(), 3);
        assert!(run.merges.is_empty());
        for (s, want) in run.snapshots.iter().zip([0.01, 0.02, 0.05]) {
            assert_eq!(s.t, want);
            for (p, q) in s.patches.iter().zip(&sys.patches) {
                assert_eq!(p.x0, q.x0);
            }
        }
    }

    #[test]
    fn shock_gathers_and_merges_patches() {
        // a coarse, homogeneous version of the sine-to-shock problem
        let lattice = MicroLattice::new(-std::f64::consts::PI, std::f64::consts::PI, 630).unwrap();
        let prof = HeterogeneityProfile::homogeneous(0.01, 1.0).unwrap();
        let layout = Layout { count: 26, n: 5, meso: vec![], gamma: 2 };
        let sys = build_system(&lattice, &prof, &layout, &InitialCondition::sine(-1.0, 1.0), &BoundaryCondition::Zero).unwrap();
        let before = sys.total_points();
        let run = run_patches(sys, &MotionParams::new(1.0, 1.0), 1.5, &[], &IntegratorConfig::default()).unwrap();
        assert!(!run.merges.is_empty());
        for m in &run.merges {
            assert!(m.x.abs() < 0.5, "merge at {}", m.x);
        }
        let last = &run.snapshots.last().unwrap().patches;
        let after: usize = last.iter().map(Patch::points).sum();
        assert_eq!(before - after, run.merges.len());
        for w in last.windows(2) {
            assert!(w[1].left_edge() - w[0].right_edge() >= -1e-9 * lattice.d);
        }
    }
}
