//! The three reference experiments.

use std::f64::consts::PI;

use crate::conditions::{BoundaryCondition, InitialCondition, SineTerm};
use crate::geometry::MesoPlacement;
use crate::integrate::IntegratorConfig;
use crate::motion::MotionParams;

use super::config::{HeterogeneitySpec, Mode, OutputConfig, PatchLayout, Reference, RunConfig};

pub const EXAMPLE1_GAM: [f64; 5] = [0.38, 1.36, 0.63, 3.97, 0.19];
pub const EXAMPLE1_EPS: [f64; 5] = [0.003, 0.033, 0.14, 0.018, 0.012];
pub const EXAMPLE2_GAM: [f64; 3] = [3.14, 0.37, 0.39];
pub const EXAMPLE2_EPS: [f64; 3] = [0.0054, 0.099, 0.0096];
pub const EXAMPLE3_GAM: [f64; 3] = [1.0039, 0.9948, 1.0013];
pub const EXAMPLE3_EPS: [f64; 3] = [0.0013, 0.0005, 0.019];

fn meso(center: f64, n: usize) -> MesoPlacement {
    MesoPlacement { center, n, node_l: None, node_r: None }
}

/// A single shock forming at the origin from `-sin x`.
pub fn example1() -> RunConfig {
    RunConfig {
        domain: [-PI, PI],
        d: 0.0016,
        heterogeneity: HeterogeneitySpec::Explicit { eps: EXAMPLE1_EPS.to_vec(), gam: EXAMPLE1_GAM.to_vec(), eps_target: 0.01 },
        patches: PatchLayout { count: 26, n: 25, meso: vec![] },
        coupling_order: 6,
        motion: MotionParams::new(10.0, 1.0),
        integrator: IntegratorConfig::default(),
        ic: InitialCondition::sine(-1.0, 1.0),
        bc: BoundaryCondition::Zero,
        t_end: 2.0,
        snapshot_dt: 0.05,
        output: OutputConfig { dir: "out/example1".into() },
        mode: Mode::Compare,
        reference: Reference::PhaseAligned,
        boundary_patches_fixed: true,
    }
}

/// Two shocks that form, approach and merge, starting with misplaced meso-patches.
pub fn example2() -> RunConfig {
    RunConfig {
        domain: [0.0, 2.0 * PI],
        d: 0.0016,
        heterogeneity: HeterogeneitySpec::Explicit { eps: EXAMPLE2_EPS.to_vec(), gam: EXAMPLE2_GAM.to_vec(), eps_target: 0.01 },
        patches: PatchLayout { count: 28, n: 15, meso: vec![meso(2.0, 150), meso(4.0, 150)] },
        coupling_order: 6,
        motion: MotionParams::new(10.0, 1.0),
        integrator: IntegratorConfig::default(),
        ic: InitialCondition::SineSeries {
            terms: vec![SineTerm { amplitude: 1.0, wavenumber: 2.0 }, SineTerm { amplitude: 0.5, wavenumber: 1.0 }],
        },
        bc: BoundaryCondition::Zero,
        t_end: 3.0,
        snapshot_dt: 0.05,
        output: OutputConfig { dir: "out/example2".into() },
        mode: Mode::Compare,
        reference: Reference::PhaseAligned,
        boundary_patches_fixed: true,
    }
}

/// Two travelling fronts, the faster overtaking the slower.
pub fn example3() -> RunConfig {
    RunConfig {
        domain: [0.0, 1.0],
        d: 1.0 / 3000.0,
        heterogeneity: HeterogeneitySpec::Explicit { eps: EXAMPLE3_EPS.to_vec(), gam: EXAMPLE3_GAM.to_vec(), eps_target: 0.001 },
        patches: PatchLayout { count: 7, n: 15, meso: vec![meso(0.25, 150), meso(0.5, 150)] },
        coupling_order: 1,
        motion: MotionParams::new(1.0, 0.01),
        integrator: IntegratorConfig::default(),
        ic: InitialCondition::BurgersThreeWave { eps: 0.001 },
        bc: BoundaryCondition::BurgersThreeWave { eps: 0.001 },
        t_end: 0.8,
        snapshot_dt: 0.02,
        output: OutputConfig { dir: "out/example3".into() },
        mode: Mode::Compare,
        reference: Reference::PhaseAligned,
        boundary_patches_fixed: true,
    }
}

pub fn builtin_examples() -> [RunConfig; 3] {
    [example1(), example2(), example3()]
}

pub fn example(k: usize) -> Option<RunConfig> {
    match k {
        1 => Some(example1()),
        2 => Some(example2()),
        3 => Some(example3()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PatchKind;

    #[test]
    fn table_values() {
        assert_eq!(EXAMPLE1_GAM, [0.38, 1.36, 0.63, 3.97, 0.19]);
        assert_eq!(EXAMPLE1_EPS, [0.003, 0.033, 0.14, 0.018, 0.012]);
        assert_eq!(EXAMPLE3_GAM, [1.0039, 0.9948, 1.0013]);
    }

    #[test]
    fn example_sizes() {
        let (lat, prof, sys) = example1().build(None).unwrap();
        assert_eq!(lat.intervals, 3925);
        assert!((prof.eps_harmonic_mean - 0.01).abs() < 1e-15);
        assert_eq!(prof.gam, EXAMPLE1_GAM.to_vec());
        assert_eq!(sys.total_points(), 26 * 51);
        let quarter = sys.coverage();
        assert!(quarter > 0.3 && quarter < 0.35, "{quarter}");

        let (lat, _, sys) = example2().build(None).unwrap();
        assert_eq!(lat.intervals, 3927);
        assert_eq!(sys.len(), 30);
        assert_eq!(sys.patches.iter().filter(|p| p.kind == PatchKind::Meso).count(), 2);

        let (lat, prof, sys) = example3().build(None).unwrap();
        assert_eq!(lat.intervals, 3000);
        assert!((prof.eps_harmonic_mean - 0.001).abs() < 1e-16);
        assert_eq!(sys.len(), 9);
    }

    #[test]
    fn unknown_example() {
        assert!(example(4).is_none());
        assert!(example(2).is_some());
    }
}
