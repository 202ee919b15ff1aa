//! The heterogeneous micro-scale lattice and the full-domain reference solver.
//!
//! Interior point `k` evolves by
//!
//! ```text
//! du_k/dt = [eps_k (u_{k+1} - u_k) - eps_{k-1} (u_k - u_{k-1})] / d^2
//!         - [gam_{k+1} u_{k+1}^2 - gam_{k-1} u_{k-1}^2] / (2 d)
//! ```
//!
//! which is the divergence of the bond flux returned by [`bond_flux`].

use serde::{Deserialize, Serialize};

use crate::conditions::{BoundaryCondition, End, InitialCondition};
use crate::error::{Error, Result};
use crate::heterogeneity::HeterogeneityProfile;
use crate::integrate::{Advance, Integrator, IntegratorConfig, OdeSystem};

/// Coefficients entering the update of one interior point `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroCoeffs {
    pub eps_left: f64,
    pub eps_right: f64,
    pub gam_left: f64,
    pub gam_right: f64,
}

#[inline]
pub fn micro_rhs(u: [f64; 3], c: MicroCoeffs, d: f64) -> f64 {
    let [ul, uc, ur] = u;
    (c.eps_right * (ur - uc) - c.eps_left * (uc - ul)) / (d * d)
        - (c.gam_right * ur * ur - c.gam_left * ul * ul) / (2.0 * d)
}

/// Flux through the bond between points `k` and `k+1`.
#[inline]
pub fn bond_flux(u_k: f64, u_k1: f64, eps_k: f64, gam_k: f64, gam_k1: f64, d: f64) -> f64 {
    eps_k * (u_k1 - u_k) / d - 0.5 * (gam_k1 * u_k1 * u_k1 + gam_k * u_k * u_k)
}

/// Evenly spaced micro points with field values.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroSegment {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub d: f64,
}

impl MicroSegment {
    pub fn new(x0: f64, d: f64, u: Vec<f64>) -> Result<Self> {
        if !(d > 0.0) {
            return Err(Error::InvalidParameter(format!("micro spacing must be positive, got {d}")));
        }
        let x = (0..u.len()).map(|i| x0 + d * i as f64).collect();
        Ok(Self { x, u, d })
    }
}

/// Writes du/dt for points `1..len-1` of `u` into `out[0..len-2]`.
/// Point `i` of the segment has phase `phase0 + i`.
pub fn segment_rhs_into(u: &[f64], d: f64, profile: &HeterogeneityProfile, phase0: usize, out: &mut [f64]) {
    let kappa = profile.kappa;
    let inv_d2 = 1.0 / (d * d);
    let inv_2d = 0.5 / d;
    let eps = &profile.eps;
    let gam = &profile.gam;
    // phases of points i-1, i, i+1
    let mut pl = phase0 % kappa;
    let mut pc = (pl + 1) % kappa;
    let mut pr = (pc + 1) % kappa;
    for i in 1..u.len() - 1 {
        let (ul, uc, ur) = (u[i - 1], u[i], u[i + 1]);
        out[i - 1] = (eps[pc] * (ur - uc) - eps[pl] * (uc - ul)) * inv_d2
            - (gam[pr] * ur * ur - gam[pl] * ul * ul) * inv_2d;
        pl = pc;
        pc = pr;
        pr = if pr + 1 == kappa { 0 } else { pr + 1 };
    }
}

pub fn segment_rhs(segment: &MicroSegment, profile: &HeterogeneityProfile, phase_of_first_point: usize) -> Result<Vec<f64>> {
    let len = segment.u.len();
    if len < 3 {
        return Err(Error::SegmentTooShort(len));
    }
    let mut out = vec![0.0; len - 2];
    segment_rhs_into(&segment.u, segment.d, profile, phase_of_first_point, &mut out);
    Ok(out)
}

/// The micro lattice `x_k = a + k d`, `k = 0..=intervals`, on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroLattice {
    pub a: f64,
    pub b: f64,
    pub intervals: usize,
    pub d: f64,
}

impl MicroLattice {
    pub fn new(a: f64, b: f64, intervals: usize) -> Result<Self> {
        if !(b > a) || intervals == 0 {
            return Err(Error::InvalidParameter(format!("invalid lattice [{a}, {b}] with {intervals} intervals")));
        }
        Ok(Self { a, b, intervals, d: (b - a) / intervals as f64 })
    }

    /// Lattice whose spacing is the nominal `d` adjusted so that the number
    /// of intervals is a multiple of `kappa`.
    pub fn snapped(a: f64, b: f64, d_nominal: f64, kappa: usize) -> Result<Self> {
        if !(d_nominal > 0.0) || kappa == 0 {
            return Err(Error::InvalidParameter(format!("invalid spacing {d_nominal} or period {kappa}")));
        }
        let periods = ((b - a) / (kappa as f64 * d_nominal)).round().max(1.0) as usize;
        Self::new(a, b, periods * kappa)
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        if k == self.intervals {
            self.b
        } else {
            self.a + self.d * k as f64
        }
    }

    pub fn points(&self) -> usize {
        self.intervals + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullDomainState {
    pub lattice: MicroLattice,
    pub u: Vec<f64>,
    pub profile: HeterogeneityProfile,
    pub bc: BoundaryCondition,
    pub t: f64,
}

impl FullDomainState {
    pub fn from_initial(lattice: MicroLattice, profile: HeterogeneityProfile, ic: &InitialCondition, bc: BoundaryCondition) -> Self {
        let mut u: Vec<f64> = (0..lattice.points()).map(|k| ic.value(lattice.x(k))).collect();
        let last = lattice.intervals;
        u[0] = bc.value(End::Left, lattice.a, 0.0);
        u[last] = bc.value(End::Right, lattice.b, 0.0);
        Self { lattice, u, profile, bc, t: 0.0 }
    }

    /// du/dt at every interior point, with the endpoints pinned to the boundary data.
    pub fn rhs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.u.len() - 2];
        segment_rhs_into(&self.u, self.lattice.d, &self.profile, 0, &mut out);
        out
    }

    /// Net flux into the interior: F_{M-1/2} - F_{1/2}.
    pub fn boundary_flux_difference(&self) -> f64 {
        let p = &self.profile;
        let d = self.lattice.d;
        let m = self.lattice.intervals;
        let u = &self.u;
        let left = bond_flux(u[0], u[1], p.eps_at(0), p.gam_at(0), p.gam_at(1), d);
        let right = bond_flux(u[m - 1], u[m], p.eps_at(m - 1), p.gam_at(m - 1), p.gam_at(m), d);
        right - left
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullSnapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

struct FullDomainOde<'a> {
    lattice: MicroLattice,
    profile: &'a HeterogeneityProfile,
    bc: &'a BoundaryCondition,
    full: Vec<f64>,
}

impl FullDomainOde<'_> {
    fn fill(&mut self, t: f64, y: &[f64]) {
        let m = self.lattice.intervals;
        self.full[0] = self.bc.value(End::Left, self.lattice.a, t);
        self.full[m] = self.bc.value(End::Right, self.lattice.b, t);
        self.full[1..m].copy_from_slice(y);
    }
}

impl OdeSystem for FullDomainOde<'_> {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self.fill(t, y);
        segment_rhs_into(&self.full, self.lattice.d, self.profile, 0, dy);
        Ok(())
    }
}

/// Default upper step bound for explicit integration of the diffusive lattice.
pub fn default_dt_max(d: f64, profile: &HeterogeneityProfile) -> f64 {
    0.2 * d * d / profile.eps_max()
}

/// Integrates the whole lattice, returning the state at every time in
/// `snapshots` (which must be nondecreasing and within `[state.t, t_end]`)
/// and at `t_end`.
pub fn run_full_domain(state: &FullDomainState, t_end: f64, snapshots: &[f64], config: &IntegratorConfig) -> Result<Vec<FullSnapshot>> {
    if t_end < state.t {
        return Err(Error::InvalidParameter(format!("t_end {t_end} precedes start time {}", state.t)));
    }
    let lattice = state.lattice;
    let m = lattice.intervals;
    if m < 2 {
        return Err(Error::SegmentTooShort(m + 1));
    }
    let mut ode = FullDomainOde { lattice, profile: &state.profile, bc: &state.bc, full: state.u.clone() };
    let bounds = config.resolve(default_dt_max(lattice.d, &state.profile))?;
    let mut integrator = Integrator::new(bounds);
    let mut t = state.t;
    let mut y = state.u[1..m].to_vec();
    let mut out = Vec::with_capacity(snapshots.len() + 1);
    let mut targets: Vec<f64> = snapshots.iter().cloned().filter(|&s| s >= state.t && s <= t_end).collect();
    if targets.last().map_or(true, |&l| l < t_end) {
        targets.push(t_end);
    }
    for &target in &targets {
        while t < target {
            match integrator.advance_to(&mut ode, &mut t, &mut y, target)? {
                Advance::Reached => {}
                Advance::Event => unreachable!("full-domain system has no events"),
            }
        }
        ode.fill(t, &y);
        out.push(FullSnapshot { t, u: ode.full.clone() });
    }
    log::debug!("full domain: {} steps ({} rejected)", integrator.steps(), integrator.rejected());
    Ok(out)
}
