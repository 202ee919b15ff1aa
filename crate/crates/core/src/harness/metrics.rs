//! Error metrics of a patch trajectory against the full-domain solution.

use crate::error::{Error, Result};
use crate::geometry::{NodeSide, Patch, PatchKind};
use crate::integrate::PatchSnapshot;
use crate::lattice::{FullSnapshot, MicroLattice};

use super::config::Reference;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub t: f64,
    pub macro_rmse: f64,
    pub micro_rmse: f64,
    pub l2_rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricSeries {
    pub rows: Vec<MetricRow>,
}

impl MetricSeries {
    pub fn max_l2_rel(&self) -> f64 {
        self.rows.iter().map(|r| r.l2_rel_err).fold(0.0, f64::max)
    }

    pub fn max_macro_rmse(&self) -> f64 {
        self.rows.iter().map(|r| r.macro_rmse).fold(0.0, f64::max)
    }

    pub fn max_micro_rmse(&self) -> f64 {
        self.rows.iter().map(|r| r.micro_rmse).fold(0.0, f64::max)
    }
}

/// Samples full-lattice values at arbitrary points.
pub struct ReferenceField<'a> {
    lattice: &'a MicroLattice,
    u: &'a [f64],
    kappa: usize,
    mode: Reference,
}

impl<'a> ReferenceField<'a> {
    pub fn new(lattice: &'a MicroLattice, u: &'a [f64], kappa: usize, mode: Reference) -> Self {
        Self { lattice, u, kappa, mode }
    }

    fn lerp(&self, x: f64, k0: usize, k1: usize) -> f64 {
        let (x0, x1) = (self.lattice.x(k0), self.lattice.x(k1));
        let s = (x - x0) / (x1 - x0);
        self.u[k0] + s * (self.u[k1] - self.u[k0])
    }

    /// Reference value at `x`, for a point of micro phase `phase`.
    pub fn at(&self, x: f64, phase: usize) -> f64 {
        let m = self.lattice.intervals;
        let pos = (x - self.lattice.a) / self.lattice.d;
        let kappa = self.kappa;
        let p = phase % kappa;
        if self.mode == Reference::Linear || m < kappa + p {
            let k0 = (pos.floor().max(0.0) as usize).min(m - 1);
            return self.lerp(x, k0, k0 + 1);
        }
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-9 && nearest >= 0.0 && (nearest as usize) <= m && nearest as usize % kappa == p {
            return self.u[nearest as usize];
        }
        // bracketing lattice indices of the same phase, kept inside the lattice
        let j = ((pos - p as f64) / kappa as f64).floor().max(0.0) as usize;
        let j = j.min((m - kappa - p) / kappa);
        let k0 = j * kappa + p;
        self.lerp(x, k0, k0 + kappa)
    }
}

fn patch_stats(patches: &[Patch], r: &ReferenceField, kappa: usize) -> (f64, usize, f64, f64, usize) {
    let (mut micro_sq, mut micro_n) = (0.0, 0usize);
    let (mut macro_sq, mut ref_sq, mut macro_n) = (0.0, 0.0, 0usize);
    for p in patches {
        let n = p.n as isize;
        for i in -n..=n {
            let e = p.u_at(i) - r.at(p.x(i), p.phase(i, kappa));
            micro_sq += e * e;
            micro_n += 1;
        }
        let nodes: &[isize] = match p.kind {
            PatchKind::Ordinary => &[0],
            PatchKind::Meso => &[p.node_l, p.node_r],
        };
        for &i in nodes {
            let want = r.at(p.x(i), p.phase(i, kappa));
            let e = p.u_at(i) - want;
            macro_sq += e * e;
            ref_sq += want * want;
            macro_n += 1;
        }
    }
    (micro_sq, micro_n, macro_sq, ref_sq, macro_n)
}

/// Metrics at one snapshot.
pub fn compare_snapshot(patches: &PatchSnapshot, full: &FullSnapshot, lattice: &MicroLattice, kappa: usize, mode: Reference) -> MetricRow {
    let r = ReferenceField::new(lattice, &full.u, kappa, mode);
    let (micro_sq, micro_n, macro_sq, ref_sq, macro_n) = patch_stats(&patches.patches, &r, kappa);
    let l2 = if ref_sq > 0.0 { (macro_sq / ref_sq).sqrt() } else { macro_sq.sqrt() };
    MetricRow {
        t: patches.t,
        macro_rmse: (macro_sq / macro_n as f64).sqrt(),
        micro_rmse: (micro_sq / micro_n as f64).sqrt(),
        l2_rel_err: l2,
    }
}

pub fn compare(patches: &[PatchSnapshot], full: &[FullSnapshot], lattice: &MicroLattice, kappa: usize, mode: Reference) -> Result<MetricSeries> {
    if patches.len() != full.len() {
        return Err(Error::SnapshotMismatch(format!("{} patch snapshots vs {} full", patches.len(), full.len())));
    }
    let mut rows = Vec::with_capacity(patches.len());
    for (p, f) in patches.iter().zip(full) {
        if (p.t - f.t).abs() > 1e-12 * p.t.abs().max(1.0) {
            return Err(Error::SnapshotMismatch(format!("times {} and {} differ", p.t, f.t)));
        }
        if f.u.len() != lattice.points() {
            return Err(Error::SnapshotMismatch(format!("full snapshot has {} values, lattice {}", f.u.len(), lattice.points())));
        }
        rows.push(compare_snapshot(p, f, lattice, kappa, mode));
    }
    Ok(MetricSeries { rows })
}

/// Patch snapshot sampled from a full-domain snapshot, used to check that the
/// pipeline scores the reference against itself as exact.
pub fn sample_patches(template: &[Patch], full: &FullSnapshot, lattice: &MicroLattice, kappa: usize) -> PatchSnapshot {
    let r = ReferenceField::new(lattice, &full.u, kappa, Reference::PhaseAligned);
    let patches = template
        .iter()
        .map(|p| {
            let mut q = p.clone();
            let n = p.n as isize;
            for i in -n..=n {
                q.u[(i + n) as usize] = r.at(p.x(i), p.phase(i, kappa));
            }
            q
        })
        .collect();
    PatchSnapshot { t: full.t, patches }
}

/// Node side label used in CSV output.
pub fn side_label(side: NodeSide) -> &'static str {
    match side {
        NodeSide::Centre => "center",
        NodeSide::Left => "node_l",
        NodeSide::Right => "node_r",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice() -> MicroLattice {
        MicroLattice::new(0.0, 1.0, 30).unwrap()
    }

    #[test]
    fn phase_aligned_skips_other_phases() {
        let lat = lattice();
        // oscillation of period 3 on top of a linear trend
        let u: Vec<f64> = (0..=30).map(|k| k as f64 / 30.0 + [0.0, 1.0, -1.0][k % 3]).collect();
        let r = ReferenceField::new(&lat, &u, 3, Reference::PhaseAligned);
        // point between lattice indices 4 and 5 belonging to phase 1
        let x = 4.5 / 30.0;
        let want = x + 1.0;
        assert!((r.at(x, 1) - want).abs() < 1e-12);
        // exactly on a lattice point
        assert_eq!(r.at(lat.x(7), 1), u[7]);
        assert_eq!(r.at(1.0, 0), u[30]);
        let lin = ReferenceField::new(&lat, &u, 3, Reference::Linear);
        assert!((lin.at(x, 1) - 0.5 * (u[4] + u[5])).abs() < 1e-12);
    }

    #[test]
    fn near_boundaries() {
        let lat = lattice();
        let u: Vec<f64> = (0..=30).map(|k| 2.0 * k as f64 / 30.0).collect();
        let r = ReferenceField::new(&lat, &u, 3, Reference::PhaseAligned);
        for phase in 0..3 {
            for &x in &[0.0, 0.01, 0.5, 0.99, 1.0] {
                assert!((r.at(x, phase) - 2.0 * x).abs() < 1e-12, "{x} {phase}");
            }
        }
    }

    #[test]
    fn identical_and_offset() {
        let lat = lattice();
        let full = FullSnapshot { t: 0.5, u: (0..=30).map(|k| (k as f64 * 0.2).sin()).collect() };
        let template = vec![
            Patch::ordinary(lat.x(3), 3, lat.d, vec![0.0; 7]),
            Patch::meso(lat.x(15), 6, lat.d, vec![0.0; 13], -3, 3),
        ];
        let snap = sample_patches(&template, &full, &lat, 3);
        let row = compare_snapshot(&snap, &full, &lat, 3, Reference::PhaseAligned);
        assert_eq!((row.macro_rmse, row.micro_rmse, row.l2_rel_err), (0.0, 0.0, 0.0));

        let mut shifted = snap.clone();
        for p in &mut shifted.patches {
            p.u.iter_mut().for_each(|v| *v += 0.25);
        }
        let row = compare_snapshot(&shifted, &full, &lat, 3, Reference::PhaseAligned);
        assert!((row.macro_rmse - 0.25).abs() < 1e-14);
        assert!((row.micro_rmse - 0.25).abs() < 1e-14);
    }

    #[test]
    fn mismatched_grids() {
        let lat = lattice();
        let full = vec![FullSnapshot { t: 0.0, u: vec![0.0; 31] }];
        assert!(compare(&[], &full, &lat, 1, Reference::Linear).is_err());
        let p = vec![PatchSnapshot { t: 0.1, patches: vec![] }];
        assert!(compare(&p, &full, &lat, 1, Reference::Linear).is_err());
    }
}
