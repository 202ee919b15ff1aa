//! CSV and manifest writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::PatchKind;
use crate::integrate::{MergeEvent, PatchSnapshot};
use crate::lattice::{FullSnapshot, MicroLattice};

use super::config::RunConfig;
use super::metrics::MetricSeries;

pub const SNAPSHOT_HEADER: &str = "t,patch,kind,x,u";

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_full_snapshots<W: Write>(w: &mut W, lattice: &MicroLattice, snaps: &[FullSnapshot]) -> Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for s in snaps {
        for (k, u) in s.u.iter().enumerate() {
            writeln!(w, "{:.16e},-1,full,{:.16e},{:.16e}", s.t, lattice.x(k), u)?;
        }
    }
    Ok(())
}

pub fn write_patch_snapshots<W: Write>(w: &mut W, snaps: &[PatchSnapshot]) -> Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for s in snaps {
        for (j, p) in s.patches.iter().enumerate() {
            let n = p.n as isize;
            for i in -n..=n {
                writeln!(w, "{:.16e},{j},micro,{:.16e},{:.16e}", s.t, p.x(i), p.u_at(i))?;
            }
            match p.kind {
                PatchKind::Ordinary => writeln!(w, "{:.16e},{j},center,{:.16e},{:.16e}", s.t, p.x0, p.u_at(0))?,
                PatchKind::Meso => {
                    writeln!(w, "{:.16e},{j},node_l,{:.16e},{:.16e}", s.t, p.x(p.node_l), p.u_at(p.node_l))?;
                    writeln!(w, "{:.16e},{j},node_r,{:.16e},{:.16e}", s.t, p.x(p.node_r), p.u_at(p.node_r))?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_metrics<W: Write>(w: &mut W, m: &MetricSeries) -> Result<()> {
    writeln!(w, "t,macro_rmse,micro_rmse,l2_rel_err")?;
    for r in &m.rows {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.macro_rmse, r.micro_rmse, r.l2_rel_err)?;
    }
    Ok(())
}

pub fn write_merges<W: Write>(w: &mut W, merges: &[MergeEvent]) -> Result<()> {
    writeln!(w, "t,x,s,n_left,n_right")?;
    for e in merges {
        writeln!(w, "{:.16e},{:.16e},{},{},{}", e.t, e.x, e.s, e.n_left, e.n_right)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'static str,
    version: &'static str,
    seed: Option<u64>,
    config: &'a RunConfig,
}

pub fn write_manifest(dir: &Path, config: &RunConfig, seed: Option<u64>) -> Result<()> {
    let m = Manifest { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), seed, config };
    let mut w = create(&dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut w, &m)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_file<F: FnOnce(&mut BufWriter<File>) -> Result<()>>(path: &Path, f: F) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}
