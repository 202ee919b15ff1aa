//! Periodic micro-scale coefficients.
//!
//! A profile holds one period of bond diffusivities `eps` and advection
//! weights `gam`. `eps[k]` multiplies the bond between micro points `k` and
//! `k+1`; `gam[k]` weights `u_k^2`. Inside a patch the cycle is anchored at
//! the patch's left edge, so the coefficients travel rigidly with the patch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneityProfile {
    pub kappa: usize,
    pub eps: Vec<f64>,
    pub gam: Vec<f64>,
    pub eps_harmonic_mean: f64,
}

pub fn harmonic_mean(values: &[f64]) -> f64 {
    values.len() as f64 / values.iter().map(|v| 1.0 / v).sum::<f64>()
}

fn arithmetic_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

impl HeterogeneityProfile {
    /// Builds a profile from explicit coefficient tables without rescaling.
    pub fn from_tables(eps: Vec<f64>, gam: Vec<f64>) -> Result<Self> {
        if eps.is_empty() || eps.len() != gam.len() {
            return Err(Error::InvalidParameter(format!(
                "coefficient tables must be nonempty and of equal length (eps {}, gam {})",
                eps.len(),
                gam.len()
            )));
        }
        if eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter("all eps must be positive and finite".into()));
        }
        if gam.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParameter("all gam must be finite".into()));
        }
        let eps_harmonic_mean = harmonic_mean(&eps);
        Ok(Self { kappa: eps.len(), eps, gam, eps_harmonic_mean })
    }

    pub fn homogeneous(eps: f64, gam: f64) -> Result<Self> {
        Self::from_tables(vec![eps], vec![gam])
    }

    pub fn eps_max(&self) -> f64 {
        self.eps.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest sum of two adjacent bond diffusivities, which bounds the
    /// spectral radius of the discrete diffusion operator by `2 * this / d^2`.
    pub fn max_adjacent_eps_sum(&self) -> f64 {
        (0..self.kappa)
            .map(|k| self.eps[k] + self.eps[(k + self.kappa - 1) % self.kappa])
            .fold(0.0, f64::max)
    }

    /// Coefficients of the absolute lattice point with the given phase.
    #[inline]
    pub fn at_phase(&self, phase: usize) -> (f64, f64) {
        let p = phase % self.kappa;
        (self.eps[p], self.gam[p])
    }

    #[inline]
    pub fn eps_at(&self, phase: usize) -> f64 {
        self.eps[phase % self.kappa]
    }

    #[inline]
    pub fn gam_at(&self, phase: usize) -> f64 {
        self.gam[phase % self.kappa]
    }
}

/// Draws `kappa` log-normal diffusivities and advection weights.
/// The result is not normalized.
pub fn sample_profile(kappa: usize, sigma_eps: f64, sigma_gam: f64, seed: u64) -> Result<HeterogeneityProfile> {
    if kappa == 0 {
        return Err(Error::InvalidParameter("kappa must be at least 1".into()));
    }
    if !(sigma_eps >= 0.0 && sigma_gam >= 0.0) {
        return Err(Error::InvalidParameter("log-normal sigmas must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_eps = Normal::new(0.0, sigma_eps).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let n_gam = Normal::new(0.0, sigma_gam).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let eps: Vec<f64> = (0..kappa).map(|_| n_eps.sample(&mut rng).exp()).collect();
    let gam: Vec<f64> = (0..kappa).map(|_| n_gam.sample(&mut rng).exp()).collect();
    HeterogeneityProfile::from_tables(eps, gam)
}

/// Rescales `eps` to the target harmonic mean and `gam` to unit mean.
pub fn normalize(profile: &HeterogeneityProfile, eps_target: f64) -> Result<HeterogeneityProfile> {
    let mut p = normalize_eps(profile, eps_target)?;
    let mean = arithmetic_mean(&p.gam);
    if mean == 0.0 || !mean.is_finite() {
        return Err(Error::InvalidParameter("gam has zero mean and cannot be normalized".into()));
    }
    p.gam.iter_mut().for_each(|g| *g /= mean);
    Ok(p)
}

/// Rescales only `eps`, leaving `gam` as given.
pub fn normalize_eps(profile: &HeterogeneityProfile, eps_target: f64) -> Result<HeterogeneityProfile> {
    if !(eps_target > 0.0 && eps_target.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps_target must be positive, got {eps_target}")));
    }
    if profile.eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter("all eps must be positive".into()));
    }
    let scale = eps_target / harmonic_mean(&profile.eps);
    let eps: Vec<f64> = profile.eps.iter().map(|e| e * scale).collect();
    Ok(HeterogeneityProfile {
        kappa: profile.kappa,
        eps_harmonic_mean: harmonic_mean(&eps),
        eps,
        gam: profile.gam.clone(),
    })
}

/// Phase of micro index `i` (in `-n..=n`) of a patch with half-count `n`.
/// The left edge always has phase 0.
pub fn patch_phase(kappa: usize, patch_micro_index: isize, patch_half_count: usize) -> usize {
    (patch_micro_index + patch_half_count as isize).rem_euclid(kappa as isize) as usize
}

/// Coefficients `(eps, gam)` seen by micro index `i` of a patch.
pub fn coeff_at(profile: &HeterogeneityProfile, patch_micro_index: isize, patch_half_count: usize) -> Result<(f64, f64)> {
    if patch_half_count % profile.kappa != 0 {
        return Err(Error::PeriodMismatch { n: patch_half_count, kappa: profile.kappa });
    }
    if patch_micro_index.unsigned_abs() > patch_half_count {
        return Err(Error::InvalidParameter(format!(
            "micro index {patch_micro_index} outside patch of half-count {patch_half_count}"
        )));
    }
    Ok(profile.at_phase(patch_phase(profile.kappa, patch_micro_index, patch_half_count)))
}
