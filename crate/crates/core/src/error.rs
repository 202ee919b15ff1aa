use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("half-count n = {n} is not a multiple of the heterogeneity period kappa = {kappa}")]
    PeriodMismatch { n: usize, kappa: usize },

    #[error("patches {left} and {right} overlap (gap {gap:e})")]
    Overlap { left: usize, right: usize, gap: f64 },

    #[error("duplicate interpolation node at x = {0}")]
    DuplicateNode(f64),

    #[error("interpolation for patch {patch} has only {available} node(s) available")]
    TooFewNodes { patch: usize, available: usize },

    #[error("macro nodes are not strictly increasing near x = {0}")]
    NonMonotone(f64),

    #[error("segment has {0} points, at least 3 are required")]
    SegmentTooShort(usize),

    #[error("patch edges do not coincide: left edge {left}, right edge {right}")]
    EdgesNotCoincident { left: f64, right: f64 },

    #[error("collision bisection did not converge after {0} iterations")]
    BisectionFailed(usize),

    #[error("step size {dt:e} fell below minimum at t = {t} (worst residual at index {worst_index})")]
    StepUnderflow { t: f64, dt: f64, worst_index: usize },

    #[error("maximum step count {0} exceeded")]
    MaxSteps(usize),

    #[error("non-finite value produced at t = {0}")]
    NonFinite(f64),

    #[error("snapshot grids do not match: {0}")]
    SnapshotMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
