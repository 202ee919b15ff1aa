//! Closed-form reference solutions.

/// Three-wave exact solution of the homogeneous viscous Burgers equation
/// `u_t + u u_x = eps u_xx`: plateaus 1, 0.5 and 0.1 separated by two
/// right-moving fronts that start at x = 0.25 and x = 0.5.
///
/// Exponents are shifted by their maximum before exponentiating, so the
/// evaluation cannot overflow for small `eps`.
pub fn exact_burgers_three_wave(x: f64, t: f64, eps: f64) -> f64 {
    let e1 = (0.5 - x - 4.95 * t) / (20.0 * eps);
    let e2 = (0.5 - x - 0.75 * t) / (4.0 * eps);
    let e3 = (0.375 - x) / (2.0 * eps);
    let m = e1.max(e2).max(e3);
    let (w1, w2, w3) = ((e1 - m).exp(), (e2 - m).exp(), (e3 - m).exp());
    (0.1 * w1 + 0.5 * w2 + w3) / (w1 + w2 + w3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_at_time_zero() {
        assert!((exact_burgers_three_wave(0.0, 0.0, 0.001) - 1.0).abs() < 1e-3);
        assert!((exact_burgers_three_wave(0.375, 0.0, 0.001) - 0.5).abs() < 1e-3);
        assert!((exact_burgers_three_wave(1.0, 0.0, 0.001) - 0.1).abs() < 1e-3);
    }

    #[test]
    fn no_overflow_for_tiny_eps() {
        for &x in &[-1.0, 0.0, 0.3, 0.7, 2.0] {
            let u = exact_burgers_three_wave(x, 0.3, 1e-6);
            assert!(u.is_finite() && (0.1..=1.0).contains(&u));
        }
    }

    #[test]
    fn fronts_move_at_rankine_hugoniot_speeds() {
        // midpoints of the fronts: 0.25 + 0.75 t and 0.5 + 0.3 t
        let eps = 0.001;
        let t = 0.2;
        assert!((exact_burgers_three_wave(0.25 + 0.75 * t, t, eps) - 0.75).abs() < 1e-2);
        assert!((exact_burgers_three_wave(0.5 + 0.3 * t, t, eps) - 0.3).abs() < 1e-2);
    }
}
