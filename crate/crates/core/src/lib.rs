//! Moving, merging patch simulations of a heterogeneous, shock-forming
//! advection-diffusion lattice.
//!
//! Small patches of the micro lattice are simulated on rigid grids, coupled
//! through polynomial interpolation of their macro node values, moved by a
//! moving-mesh equation toward regions of high curvature, and merged into
//! wider meso-patches when they collide.

pub mod conditions;
pub mod coupling;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod heterogeneity;
pub mod integrate;
pub mod lattice;
pub mod merging;
pub mod motion;

pub use error::{Error, Result};
