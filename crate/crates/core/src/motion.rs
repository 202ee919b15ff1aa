//! Patch velocities.
//!
//! Ordinary patches follow a discretised moving-mesh equation that relaxes
//! the macro nodes toward equidistribution of a curvature-based density.
//! Meso-patches relax toward the gradient-weighted centre of their own
//! micro field. Every micro point of a patch moves with the patch.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MacroNode, NodeSide, Patch, PatchKind, PatchSystem};

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionParams {
    pub tau: f64,
    pub beta: f64,
    /// Stride of the difference estimator in the meso target; defaults to kappa.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing_stride: Option<usize>,
    /// Stride of the chain-rule difference; defaults to kappa.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advection_stride: Option<usize>,
    /// When false every patch is stationary.
    #[serde(default = "default_true")]
    pub moving: bool,
}

impl MotionParams {
    pub fn new(tau: f64, beta: f64) -> Self {
        Self { tau, beta, smoothing_stride: None, advection_stride: None, moving: true }
    }

    pub fn stationary() -> Self {
        Self { tau: 1.0, beta: 1.0, smoothing_stride: None, advection_stride: None, moving: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("tau and beta must be positive, got {} and {}", self.tau, self.beta)));
        }
        if self.smoothing_stride == Some(0) || self.advection_stride == Some(0) {
            return Err(Error::InvalidParameter("difference strides must be positive".into()));
        }
        Ok(())
    }

    pub fn stride(&self, kappa: usize) -> usize {
        self.smoothing_stride.unwrap_or(kappa)
    }

    pub fn advection_stride(&self, kappa: usize) -> usize {
        self.advection_stride.unwrap_or(kappa)
    }
}

/// Second difference on a nonuniform stencil with spacings `h_m` (left) and `h_p` (right).
#[inline]
pub fn second_diff(u_m: f64, u: f64, u_p: f64, h_m: f64, h_p: f64) -> Result<f64> {
    if !(h_m > 0.0) || !(h_p > 0.0) {
        return Err(Error::InvalidParameter(format!("nonpositive node spacing ({h_m}, {h_p})")));
    }
    Ok(2.0 / (h_p + h_m) * ((u_p - u) / h_p - (u - u_m) / h_m))
}

/// Density normalisation from node curvatures `upp[j]` and spacings
/// `h[j] = X_{j+1} - X_j`; `length` is the extent the nodes span.
pub fn alpha(upp: &[f64], h: &[f64], length: f64) -> f64 {
    let mut sum = 0.0;
    for j in 1..upp.len() {
        sum += h[j - 1] * 0.5 * (upp[j].abs().powf(2.0 / 3.0) + upp[j - 1].abs().powf(2.0 / 3.0));
    }
    (sum / length).powi(3).max(1.0)
}

#[inline]
pub fn density(upp: f64, alpha: f64) -> f64 {
    (1.0 + upp * upp / alpha).cbrt()
}

/// Mesh velocities of the nodes `nodes[region]`. The two end nodes stay put.
/// Writes one velocity per node of the region into `v`.
pub fn region_velocities(nodes: &[MacroNode], tau: f64, v: &mut Vec<f64>) -> Result<()> {
    let n = nodes.len();
    v.clear();
    v.resize(n, 0.0);
    if n < 3 {
        return Ok(());
    }
    let mut h = Vec::with_capacity(n - 1);
    for w in nodes.windows(2) {
        let hj = w[1].x - w[0].x;
        if !(hj > 0.0) {
            return Err(Error::NonMonotone(w[1].x));
        }
        h.push(hj);
    }
    let mut upp = vec![0.0; n];
    for j in 1..n - 1 {
        upp[j] = second_diff(nodes[j - 1].u, nodes[j].u, nodes[j + 1].u, h[j - 1], h[j])?;
    }
    upp[0] = upp[1];
    upp[n - 1] = upp[n - 2];
    let length = nodes[n - 1].x - nodes[0].x;
    let a = alpha(&upp, &h, length);
    let rho: Vec<f64> = upp.iter().map(|&c| density(c, a)).collect();
    let scale = ((n - 1) * (n - 1)) as f64 / (2.0 * tau);
    for j in 1..n - 1 {
        v[j] = scale / rho[j] * ((rho[j + 1] + rho[j]) * h[j] - (rho[j] + rho[j - 1]) * h[j - 1]);
    }
    Ok(())
}

/// Velocities of every ordinary patch; meso and fixed patches get 0.
pub fn ordinary_velocities(
    nodes: &[MacroNode],
    regions: &[RangeInclusive<usize>],
    system: &PatchSystem,
    params: &MotionParams,
    out: &mut [f64],
) -> Result<()> {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut v = Vec::new();
    for r in regions {
        let slice = &nodes[r.clone()];
        region_velocities(slice, params.tau, &mut v)?;
        for (node, &vel) in slice.iter().zip(&v) {
            if node.side == NodeSide::Centre && !system.patches[node.patch].fixed {
                out[node.patch] = vel;
            }
        }
    }
    Ok(())
}

/// Gradient-weighted centre of the patch field using differences over
/// `stride` micro intervals; the patch centre when the field is flat.
pub fn meso_target(patch: &Patch, stride: usize) -> f64 {
    let n = patch.n as isize;
    let k = stride as isize;
    let (mut num, mut den) = (0.0, 0.0);
    let mut i = -n;
    while i + k <= n {
        let (xa, xb) = (patch.x(i), patch.x(i + k));
        let slope = (patch.u_at(i + k) - patch.u_at(i)) / (xb - xa);
        let w = slope * slope;
        num += 0.5 * (xa + xb) * w;
        den += w;
        i += 1;
    }
    if den > 0.0 && (num / den).is_finite() {
        num / den
    } else {
        patch.x0
    }
}

#[inline]
pub fn meso_velocity(target: f64, x0: f64, beta: f64) -> f64 {
    (target - x0) / beta
}

/// Adds `V * u_x` at each interior point to `du`, with `u_x` from centred
/// differences over `stride` micro intervals. Points too close to an edge
/// for a centred difference use the one-sided second-order formula over the
/// same stride, or stride 1 when the patch is too short for either.
///
/// A stride of kappa differences points of equal heterogeneity phase, so
/// the correction transports the phase envelope rather than the micro
/// oscillation between neighbouring phases.
pub fn advect_correction(u: &[f64], v: f64, d: f64, stride: usize, du: &mut [f64]) {
    if v == 0.0 {
        return;
    }
    let len = u.len();
    let s = stride.max(1);
    let c = v / (2.0 * s as f64 * d);
    let c1 = v / (2.0 * d);
    for i in 1..len - 1 {
        du[i - 1] += if i >= s && i + s < len {
            c * (u[i + s] - u[i - s])
        } else if i + 2 * s < len {
            c * (-3.0 * u[i] + 4.0 * u[i + s] - u[i + 2 * s])
        } else if i >= 2 * s {
            c * (3.0 * u[i] - 4.0 * u[i - s] + u[i - 2 * s])
        } else {
            c1 * (u[i + 1] - u[i - 1])
        };
    }
}

/// Velocity of every patch of the system.
pub fn patch_velocities(
    system: &PatchSystem,
    nodes: &[MacroNode],
    regions: &[RangeInclusive<usize>],
    params: &MotionParams,
    out: &mut [f64],
) -> Result<()> {
    if !params.moving {
        out.iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }
    ordinary_velocities(nodes, regions, system, params, out)?;
    let stride = params.stride(system.profile.kappa);
    for (j, p) in system.patches.iter().enumerate() {
        if p.kind == PatchKind::Meso && !p.fixed {
            out[j] = meso_velocity(meso_target(p, stride), p.x0, params.beta);
        }
    }
    Ok(())
}
