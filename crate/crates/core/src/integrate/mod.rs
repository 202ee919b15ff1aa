//! Adaptive explicit time stepping shared by the full-domain solver and the
//! patch system.
//!
//! The stepper is the Dormand-Prince 5(4) pair with FSAL and a PI step-size
//! controller. Systems may expose a scalar event function; when an otherwise
//! acceptable step drives it negative, the step is cut back by bisection to
//! the first time the event function lies in `[0, tol]`.

mod patches;

pub use patches::{
    run_patches, system_rhs, MergeEvent, PatchOde, PatchRun, PatchSnapshot, SystemDerivative,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait OdeSystem {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;

    /// Event function of the state; `None` when the system has no events.
    fn event(&mut self, _t: f64, _y: &[f64]) -> Option<f64> {
        None
    }

    /// Event values in `[0, tol]` count as a located event.
    fn event_tolerance(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Defaults to `dt_max / 10`.
    pub dt_init: Option<f64>,
    pub dt_min: f64,
    /// Defaults to a problem-dependent stability bound.
    pub dt_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-8, dt_init: None, dt_min: 1e-14, dt_max: None, max_steps: 50_000_000 }
    }
}

/// Integrator settings with every step bound resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub max_steps: usize,
}

impl IntegratorConfig {
    pub fn resolve(&self, default_dt_max: f64) -> Result<StepBounds> {
        let dt_max = self.dt_max.unwrap_or(default_dt_max);
        let dt_init = self.dt_init.unwrap_or(dt_max / 10.0).min(dt_max);
        let b = StepBounds {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            dt_init,
            dt_min: self.dt_min,
            dt_max,
            max_steps: self.max_steps,
        };
        if !(b.rel_tol > 0.0 && b.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("integrator tolerances must be positive".into()));
        }
        if !(b.dt_min > 0.0 && b.dt_min <= b.dt_init && b.dt_init <= b.dt_max && b.dt_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < dt_min <= dt_init <= dt_max, got {} / {} / {}",
                b.dt_min, b.dt_init, b.dt_max
            )));
        }
        if b.max_steps == 0 {
            return Err(Error::InvalidParameter("max_steps must be positive".into()));
        }
        Ok(b)
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// b - b_hat, including the FSAL stage
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Advance {
    /// The target time was reached exactly.
    Reached,
    /// The integration stopped at a located event.
    Event,
}

/// Result of one trial step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStep {
    /// Scaled RMS error estimate; the step is acceptable when `<= 1`.
    pub error: f64,
    pub worst_index: usize,
}

pub struct Integrator {
    bounds: StepBounds,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
    k1_ready: bool,
    dt: f64,
    err_prev: f64,
    steps: usize,
    rejected: usize,
}

impl Integrator {
    pub fn new(bounds: StepBounds) -> Self {
        Self {
            bounds,
            k: Default::default(),
            stage: Vec::new(),
            y_new: Vec::new(),
            k1_ready: false,
            dt: bounds.dt_init,
            err_prev: 1e-4,
            steps: 0,
            rejected: 0,
        }
    }

    pub fn bounds(&self) -> &StepBounds {
        &self.bounds
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    /// Suggested size of the next step.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Forget cached stage data; required whenever the state is modified
    /// outside the integrator (for example after a merge changes its size).
    pub fn reset(&mut self) {
        self.k1_ready = false;
    }

    fn ensure_dim(&mut self, n: usize) {
        if self.stage.len() != n {
            for k in self.k.iter_mut() {
                k.resize(n, 0.0);
            }
            self.stage.resize(n, 0.0);
            self.y_new.resize(n, 0.0);
            self.k1_ready = false;
        }
    }

    fn prime<S: OdeSystem>(&mut self, sys: &mut S, t: f64, y: &[f64]) -> Result<()> {
        self.ensure_dim(y.len());
        if !self.k1_ready {
            let (k1, _) = self.k.split_at_mut(1);
            sys.rhs(t, y, &mut k1[0])?;
            self.k1_ready = true;
        }
        Ok(())
    }

    fn combine(&mut self, y: &[f64], dt: f64, coeffs: &[f64]) {
        let stage = &mut self.stage;
        stage.copy_from_slice(y);
        for (j, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                let f = dt * a;
                for (s, kj) in stage.iter_mut().zip(&self.k[j]) {
                    *s += f * kj;
                }
            }
        }
    }

    /// One Dormand-Prince step of size `dt` from `(t, y)`; the proposed state
    /// is left in the internal buffer (see [`Integrator::proposed`]).
    pub fn trial<S: OdeSystem>(&mut self, sys: &mut S, t: f64, y: &[f64], dt: f64) -> Result<TrialStep> {
        self.prime(sys, t, y)?;
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            self.combine(y, dt, row);
            let stage = std::mem::take(&mut self.stage);
            let res = sys.rhs(t + C[s + 1] * dt, &stage, &mut self.k[s + 1]);
            self.stage = stage;
            res?;
        }
        self.combine(y, dt, &B);
        std::mem::swap(&mut self.stage, &mut self.y_new);
        {
            let (_, k7) = self.k.split_at_mut(6);
            sys.rhs(t + dt, &self.y_new, &mut k7[0])?;
        }
        let (atol, rtol) = (self.bounds.abs_tol, self.bounds.rel_tol);
        let mut sum = 0.0;
        let mut worst = (0usize, 0.0f64);
        for i in 0..y.len() {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * self.k[j][i];
            }
            let sk = atol + rtol * y[i].abs().max(self.y_new[i].abs());
            let r = dt * e / sk;
            if !r.is_finite() || !self.y_new[i].is_finite() {
                return Ok(TrialStep { error: f64::INFINITY, worst_index: i });
            }
            if r.abs() > worst.1 {
                worst = (i, r.abs());
            }
            sum += r * r;
        }
        let error = if y.is_empty() { 0.0 } else { (sum / y.len() as f64).sqrt() };
        Ok(TrialStep { error, worst_index: worst.0 })
    }

    /// State produced by the last [`Integrator::trial`].
    pub fn proposed(&self) -> &[f64] {
        &self.y_new
    }

    fn commit(&mut self, y: &mut Vec<f64>) {
        y.copy_from_slice(&self.y_new);
        self.k.swap(0, 6);
        self.k1_ready = true;
    }

    fn next_dt(&mut self, dt: f64, err: f64, accepted: bool) -> f64 {
        let expo = 0.2 - PI_BETA * 0.75;
        if accepted {
            let fac = err.max(1e-10).powf(expo) / self.err_prev.powf(PI_BETA) / SAFETY;
            let fac = fac.clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            self.err_prev = err.max(1e-4);
            dt / fac
        } else {
            let fac = (err.powf(expo) / SAFETY).min(1.0 / FAC_MIN);
            dt / fac.max(1.0)
        }
    }

    /// Advance `(t, y)` toward `t_target`, stopping early at a located event.
    /// On `Reached`, `t == t_target` exactly.
    pub fn advance_to<S: OdeSystem>(&mut self, sys: &mut S, t: &mut f64, y: &mut Vec<f64>, t_target: f64) -> Result<Advance> {
        let tol = sys.event_tolerance();
        if let Some(g) = sys.event(*t, y) {
            if g <= tol {
                return Ok(Advance::Event);
            }
        }
        while *t < t_target {
            if self.steps + self.rejected >= self.bounds.max_steps {
                return Err(Error::MaxSteps(self.bounds.max_steps));
            }
            let remaining = t_target - *t;
            let mut dt = self.dt.min(self.bounds.dt_max);
            let last = dt >= remaining * (1.0 - 1e-12);
            if last {
                dt = remaining;
            }
            let trial = self.trial(sys, *t, y, dt)?;
            if trial.error <= 1.0 {
                if let Some(g) = sys.event(*t + dt, &self.y_new) {
                    if g < 0.0 {
                        let dt_event = self.locate_event(sys, *t, y, dt, tol)?;
                        y.copy_from_slice(&self.y_new);
                        *t += dt_event;
                        self.k1_ready = false;
                        self.steps += 1;
                        return Ok(Advance::Event);
                    }
                }
                self.commit(y);
                self.steps += 1;
                let proposal = self.next_dt(dt, trial.error, true);
                if !last {
                    self.dt = proposal;
                } else {
                    // keep the pre-truncation step size for the next interval
                    self.dt = self.dt.max(proposal);
                }
                *t = if last { t_target } else { *t + dt };
                if let Some(g) = sys.event(*t, y) {
                    if g <= tol {
                        return Ok(Advance::Event);
                    }
                }
            } else {
                self.rejected += 1;
                self.dt = self.next_dt(dt, trial.error, false);
                if self.dt < self.bounds.dt_min {
                    return Err(Error::StepUnderflow { t: *t, dt: self.dt, worst_index: trial.worst_index });
                }
            }
        }
        Ok(Advance::Reached)
    }

    /// Bisection on the step size for the first event crossing in `(0, dt]`.
    /// Leaves the event state in the proposal buffer and returns its step size.
    fn locate_event<S: OdeSystem>(&mut self, sys: &mut S, t: f64, y: &[f64], dt: f64, tol: f64) -> Result<f64> {
        let mut lo = 0.0;
        let mut hi = dt;
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            self.trial(sys, t, y, mid)?;
            let g = sys.event(t + mid, &self.y_new).unwrap_or(f64::INFINITY);
            if g < 0.0 {
                hi = mid;
            } else if g > tol {
                lo = mid;
            } else {
                return Ok(mid);
            }
            if hi - lo <= f64::EPSILON * t.abs().max(dt) {
                break;
            }
        }
        Err(Error::BisectionFailed(MAX_BISECTIONS))
    }
}

pub const MAX_BISECTIONS: usize = 128;

/// Bisection for the first root of a decreasing gap function on `[0, dt]`:
/// returns `s` with `gap(s)` in `[0, tol]`, given `gap(0) > tol` and `gap(dt) < 0`.
pub fn locate_crossing<F: FnMut(f64) -> Result<f64>>(mut gap: F, dt: f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = dt;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid)?;
        if g < 0.0 {
            hi = mid;
        } else if g > tol {
            lo = mid;
        } else {
            return Ok(mid);
        }
    }
    Err(Error::BisectionFailed(MAX_BISECTIONS))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl OdeSystem for Decay {
        fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = -y[0];
            Ok(())
        }
    }

    struct Smooth;
    impl OdeSystem for Smooth {
        fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = y[1];
            dy[1] = -y[0] + 0.1 * t.cos();
            Ok(())
        }
    }

    /// Position x with constant velocity; event when x reaches 1.
    struct Mover;
    impl OdeSystem for Mover {
        fn rhs(&mut self, _t: f64, _y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = 2.0;
            Ok(())
        }
        fn event(&mut self, _t: f64, y: &[f64]) -> Option<f64> {
            Some(1.0 - y[0])
        }
        fn event_tolerance(&self) -> f64 {
            1e-12
        }
    }

    fn bounds() -> StepBounds {
        IntegratorConfig { rel_tol: 1e-10, abs_tol: 1e-12, ..Default::default() }.resolve(0.1).unwrap()
    }

    #[test]
    fn scalar_decay() {
        let mut integ = Integrator::new(bounds());
        let mut sys = Decay;
        let (mut t, mut y) = (0.0, vec![1.0]);
        assert_eq!(integ.advance_to(&mut sys, &mut t, &mut y, 1.0).unwrap(), Advance::Reached);
        assert_eq!(t, 1.0);
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
        // single step from 1 of size dt
        let mut integ = Integrator::new(bounds());
        integ.trial(&mut Decay, 0.0, &[1.0], 0.05).unwrap();
        assert!((integ.proposed()[0] - (-0.05f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn error_estimate_order() {
        // local error estimate of a 5(4) pair scales like dt^5
        let y0 = [1.0, 0.0];
        // absolute scaling only, so the estimate itself is compared
        let abs = IntegratorConfig { rel_tol: 1e-300, abs_tol: 1.0, ..Default::default() }.resolve(0.1).unwrap();
        let mut integ = Integrator::new(abs);
        let e1 = integ.trial(&mut Smooth, 0.0, &y0, 0.04).unwrap().error;
        let e2 = integ.trial(&mut Smooth, 0.0, &y0, 0.02).unwrap().error;
        let order = (e1 / e2).log2();
        assert!((order - 5.0).abs() < 0.5, "observed order {order}");
    }

    #[test]
    fn event_located_and_step_truncated() {
        let mut integ = Integrator::new(bounds());
        let mut sys = Mover;
        let (mut t, mut y) = (0.0, vec![0.0]);
        assert_eq!(integ.advance_to(&mut sys, &mut t, &mut y, 3.0).unwrap(), Advance::Event);
        assert!((t - 0.5).abs() < 1e-11);
        let g = 1.0 - y[0];
        assert!((0.0..=1e-12).contains(&g));
    }

    #[test]
    fn no_event_when_gap_stays_positive() {
        let mut integ = Integrator::new(bounds());
        let mut sys = Mover;
        let (mut t, mut y) = (0.0, vec![0.0]);
        assert_eq!(integ.advance_to(&mut sys, &mut t, &mut y, 0.25).unwrap(), Advance::Reached);
        assert_eq!(t, 0.25);
    }

    #[test]
    fn linear_crossing() {
        let (g0, v) = (0.3, 1.7);
        let s = locate_crossing(|t| Ok(g0 - v * t), 1.0, 1e-13).unwrap();
        assert!((s - g0 / v).abs() < 1e-12);
        assert!(matches!(locate_crossing(|_| Ok(-1.0), 1.0, 0.0), Err(Error::BisectionFailed(_))));
    }

    #[test]
    fn resolve_validates_bounds() {
        let bad = IntegratorConfig { dt_min: 1.0, ..Default::default() };
        assert!(bad.resolve(0.1).is_err());
        let bad = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(bad.resolve(0.1).is_err());
        let ok = IntegratorConfig::default().resolve(0.1).unwrap();
        assert_eq!(ok.dt_max, 0.1);
        assert!((ok.dt_init - 0.01).abs() < 1e-15);
    }
}
