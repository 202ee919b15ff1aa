//! Named initial and boundary conditions.

use serde::{Deserialize, Serialize};

use crate::harness::exact::exact_burgers_three_wave;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineTerm {
    pub amplitude: f64,
    pub wavenumber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    Constant { value: f64 },
    /// `sum_k amplitude_k * sin(wavenumber_k * x)`
    SineSeries { terms: Vec<SineTerm> },
    BurgersThreeWave { eps: f64 },
}

impl InitialCondition {
    pub fn sine(amplitude: f64, wavenumber: f64) -> Self {
        InitialCondition::SineSeries { terms: vec![SineTerm { amplitude, wavenumber }] }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            InitialCondition::Zero => 0.0,
            InitialCondition::Constant { value } => *value,
            InitialCondition::SineSeries { terms } => {
                terms.iter().map(|s| s.amplitude * (s.wavenumber * x).sin()).sum()
            }
            InitialCondition::BurgersThreeWave { eps } => exact_burgers_three_wave(x, 0.0, *eps),
        }
    }
}

/// Dirichlet data at the two ends of the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCondition {
    Zero,
    Constant { left: f64, right: f64 },
    BurgersThreeWave { eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

impl BoundaryCondition {
    /// Value imposed at boundary coordinate `x` (either `a` or `b`).
    pub fn value(&self, end: End, x: f64, t: f64) -> f64 {
        match self {
            BoundaryCondition::Zero => 0.0,
            BoundaryCondition::Constant { left, right } => match end {
                End::Left => *left,
                End::Right => *right,
            },
            BoundaryCondition::BurgersThreeWave { eps } => exact_burgers_three_wave(x, t, *eps),
        }
    }
}
