//! Configuration, reference experiments, metrics and output.

pub mod builtin;
pub mod config;
pub mod exact;
pub mod metrics;
pub mod output;
pub mod run;

pub use builtin::{builtin_examples, example, example1, example2, example3};
pub use config::{HeterogeneitySpec, Mode, PatchLayout, Reference, RunConfig};
pub use exact::exact_burgers_three_wave;
pub use metrics::{compare, MetricRow, MetricSeries};
pub use run::{run, simulate, write_outputs, Outcome, RunOptions};
