//! Run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conditions::{BoundaryCondition, InitialCondition};
use crate::error::{Error, Result};
use crate::geometry::{build_system, Layout, MesoPlacement, PatchSystem};
use crate::heterogeneity::{normalize, normalize_eps, sample_profile, HeterogeneityProfile};
use crate::integrate::IntegratorConfig;
use crate::lattice::MicroLattice;
use crate::motion::MotionParams;

/// Either a log-normal sample or an explicit coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HeterogeneitySpec {
    /// Explicit tables; `eps` is rescaled to the target harmonic mean, `gam` is used as listed.
    Explicit { eps: Vec<f64>, gam: Vec<f64>, eps_target: f64 },
    Sampled { kappa: usize, sigma_eps: f64, sigma_gam: f64, seed: u64, eps_target: f64 },
}

impl HeterogeneitySpec {
    pub fn kappa(&self) -> usize {
        match self {
            HeterogeneitySpec::Explicit { eps, .. } => eps.len(),
            HeterogeneitySpec::Sampled { kappa, .. } => *kappa,
        }
    }

    /// Builds the profile; `seed` overrides the seed of a sampled table.
    pub fn profile(&self, seed: Option<u64>) -> Result<HeterogeneityProfile> {
        match self {
            HeterogeneitySpec::Explicit { eps, gam, eps_target } => {
                normalize_eps(&HeterogeneityProfile::from_tables(eps.clone(), gam.clone())?, *eps_target)
            }
            HeterogeneitySpec::Sampled { kappa, sigma_eps, sigma_gam, seed: own, eps_target } => {
                let raw = sample_profile(*kappa, *sigma_eps, *sigma_gam, seed.unwrap_or(*own))?;
                normalize(&raw, *eps_target)
            }
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            HeterogeneitySpec::Sampled { seed, .. } => Some(*seed),
            HeterogeneitySpec::Explicit { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchLayout {
    /// Ordinary patches, including the two boundary patches.
    pub count: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meso: Vec<MesoPlacement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    Patches,
    #[default]
    Compare,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "patches" => Ok(Mode::Patches),
            "compare" => Ok(Mode::Compare),
            _ => Err(Error::Config(format!("unknown mode '{s}' (expected full, patches or compare)"))),
        }
    }
}

/// How reference values at patch points are taken from the full lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Linear interpolation between the lattice points of the same micro phase.
    #[default]
    PhaseAligned,
    /// Linear interpolation between adjacent lattice points.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: [f64; 2],
    /// Nominal micro spacing; the lattice uses the nearest spacing that fits
    /// a whole number of heterogeneity periods into the domain.
    pub d: f64,
    pub heterogeneity: HeterogeneitySpec,
    pub patches: PatchLayout,
    #[serde(alias = "Gamma")]
    pub coupling_order: usize,
    pub motion: MotionParams,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub ic: InitialCondition,
    pub bc: BoundaryCondition,
    pub t_end: f64,
    pub snapshot_dt: f64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub reference: Reference,
    #[serde(default = "default_true")]
    pub boundary_patches_fixed: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn lattice(&self) -> Result<MicroLattice> {
        let [a, b] = self.domain;
        MicroLattice::snapped(a, b, self.d, self.heterogeneity.kappa())
    }

    pub fn layout(&self) -> Layout {
        Layout { count: self.patches.count, n: self.patches.n, meso: self.patches.meso.clone(), gamma: self.coupling_order }
    }

    /// Snapshot times `0, dt, 2 dt, ...` up to and including `t_end`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let t = k as f64 * self.snapshot_dt;
            if t > self.t_end * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            k += 1;
        }
        out.push(self.t_end);
        out
    }

    pub fn build(&self, seed: Option<u64>) -> Result<(MicroLattice, HeterogeneityProfile, PatchSystem)> {
        let lattice = self.lattice()?;
        let profile = self.heterogeneity.profile(seed)?;
        let system = build_system(&lattice, &profile, &self.layout(), &self.ic, &self.bc)?;
        Ok((lattice, profile, system))
    }

    /// Checks every invariant a run relies on without running it.
    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Config(format!("domain [{a}, {b}] is empty or not finite")));
        }
        if !(self.d > 0.0) || self.d > (b - a) {
            return Err(Error::Config(format!("micro spacing d = {} is invalid", self.d)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end = {} must be positive", self.t_end)));
        }
        if !(self.snapshot_dt > 0.0) {
            return Err(Error::Config(format!("snapshot_dt = {} must be positive", self.snapshot_dt)));
        }
        if self.coupling_order == 0 {
            return Err(Error::Config("coupling_order must be at least 1".into()));
        }
        if !self.boundary_patches_fixed {
            return Err(Error::Config("only fixed boundary patches are supported (periodic domains are not)".into()));
        }
        if let HeterogeneitySpec::Explicit { eps, gam, .. } = &self.heterogeneity {
            if eps.len() != gam.len() {
                return Err(Error::Config(format!("eps has {} entries but gam has {}", eps.len(), gam.len())));
            }
        }
        self.motion.validate()?;
        let (lattice, profile, system) = self.build(None)?;
        self.integrator.resolve(crate::lattice::default_dt_max(lattice.d, &profile))?;
        crate::coupling::CouplingPlan::new(&system)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::builtin::builtin_examples;

    #[test]
    fn examples_round_trip() {
        for cfg in builtin_examples() {
            let text = cfg.to_json().unwrap();
            let back = RunConfig::from_json(&text).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_json().unwrap(), text);
        }
    }

    #[test]
    fn examples_validate() {
        for cfg in builtin_examples() {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn gamma_alias_and_sampled_profile() {
        let mut v: serde_json::Value = serde_json::from_str(&builtin_examples()[0].to_json().unwrap()).unwrap();
        let obj = v.as_object_mut().unwrap();
        let g = obj.remove("coupling_order").unwrap();
        obj.insert("Gamma".into(), g);
        obj.insert(
            "heterogeneity".into(),
            serde_json::json!({"kappa": 5, "sigma_eps": 1.0, "sigma_gam": 2.0, "seed": 7, "eps_target": 0.01}),
        );
        let cfg = RunConfig::from_json(&v.to_string()).unwrap();
        assert_eq!(cfg.coupling_order, 6);
        let p = cfg.heterogeneity.profile(None).unwrap();
        assert!((p.eps_harmonic_mean - 0.01).abs() < 1e-14);
        assert_ne!(p, cfg.heterogeneity.profile(Some(8)).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = builtin_examples()[0].clone();
        cfg.patches.n = 24;
        let e = cfg.validate().unwrap_err();
        assert!(e.to_string().contains("multiple of the heterogeneity period"), "{e}");
        let mut cfg = builtin_examples()[0].clone();
        cfg.boundary_patches_fixed = false;
        assert!(cfg.validate().is_err());
        assert!(RunConfig::from_json("{\"domain\": [0, 1]}").is_err());
        assert!("sideways".parse::<Mode>().is_err());
    }

    #[test]
    fn snapshot_schedule() {
        let mut cfg = builtin_examples()[0].clone();
        cfg.t_end = 1.0;
        cfg.snapshot_dt = 0.3;
        assert_eq!(cfg.snapshot_times(), vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        cfg.snapshot_dt = 0.25;
        assert_eq!(cfg.snapshot_times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
