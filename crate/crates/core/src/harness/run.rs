//! Mode dispatch: full-domain, patch, or both with comparison metrics.

use std::path::Path;

use crate::error::Result;
use crate::heterogeneity::HeterogeneityProfile;
use crate::integrate::{run_patches, PatchRun};
use crate::lattice::{run_full_domain, FullDomainState, FullSnapshot, MicroLattice};

use super::config::{Mode, RunConfig};
use super::metrics::{compare, MetricSeries};
use super::output::{write_file, write_full_snapshots, write_manifest, write_merges, write_metrics, write_patch_snapshots};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub snapshot_dt: Option<f64>,
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub config: RunConfig,
    pub lattice: MicroLattice,
    pub profile: HeterogeneityProfile,
    pub full: Option<Vec<FullSnapshot>>,
    pub patches: Option<PatchRun>,
    pub metrics: Option<MetricSeries>,
}

fn apply(config: &RunConfig, opts: &RunOptions) -> RunConfig {
    let mut c = config.clone();
    if let Some(dt) = opts.snapshot_dt {
        c.snapshot_dt = dt;
    }
    if let Some(m) = opts.mode {
        c.mode = m;
    }
    c
}

/// Runs the configured simulations without writing anything.
pub fn simulate(config: &RunConfig, opts: &RunOptions) -> Result<Outcome> {
    let config = apply(config, opts);
    config.validate()?;
    let (lattice, profile, system) = config.build(opts.seed)?;
    let times = config.snapshot_times();
    let want_full = matches!(config.mode, Mode::Full | Mode::Compare);
    let want_patches = matches!(config.mode, Mode::Patches | Mode::Compare);

    let full_job = || -> Result<Vec<FullSnapshot>> {
        let state = FullDomainState::from_initial(lattice, profile.clone(), &config.ic, config.bc.clone());
        run_full_domain(&state, config.t_end, &times, &config.integrator)
    };
    let patch_job = || -> Result<PatchRun> { run_patches(system.clone(), &config.motion, config.t_end, &times, &config.integrator) };

    let (full, patches) = match (want_full, want_patches) {
        (true, true) => {
            let (f, p) = std::thread::scope(|s| {
                let h = s.spawn(full_job);
                let p = patch_job();
                (h.join().expect("full-domain worker panicked"), p)
            });
            (Some(f?), Some(p?))
        }
        (true, false) => (Some(full_job()?), None),
        (false, _) => (None, Some(patch_job()?)),
    };
    let metrics = match (&full, &patches) {
        (Some(f), Some(p)) => Some(compare(&p.snapshots, f, &lattice, profile.kappa, config.reference)?),
        _ => None,
    };
    Ok(Outcome { config, lattice, profile, full, patches, metrics })
}

pub fn write_outputs(outcome: &Outcome, dir: &Path, seed: Option<u64>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if let Some(f) = &outcome.full {
        write_file(&dir.join("snapshots_full.csv"), |w| write_full_snapshots(w, &outcome.lattice, f))?;
    }
    if let Some(p) = &outcome.patches {
        write_file(&dir.join("snapshots_patches.csv"), |w| write_patch_snapshots(w, &p.snapshots))?;
        write_file(&dir.join("merges.csv"), |w| write_merges(w, &p.merges))?;
    }
    if let Some(m) = &outcome.metrics {
        write_file(&dir.join("metrics.csv"), |w| write_metrics(w, m))?;
    }
    write_manifest(dir, &outcome.config, seed.or(outcome.config.heterogeneity.seed()))
}

/// Simulates and writes every output into `dir` (the config's own output
/// directory when `None`).
pub fn run(config: &RunConfig, opts: &RunOptions, dir: Option<&Path>) -> Result<Outcome> {
    let outcome = simulate(config, opts)?;
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(|| outcome.config.output.dir.clone());
    write_outputs(&outcome, &dir, opts.seed)?;
    Ok(outcome)
}
