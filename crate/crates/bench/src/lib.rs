//! Shared fixtures for the criterion benches.

use nrblockade::SystemParams;

/// Strong-coupling, low-temperature point used for the `g2` benches.
pub fn blockade_params() -> SystemParams {
    SystemParams { g_s: 1.0, g_d: 1.0, kappa: 0.15, n_thermal: 1e-3, ..SystemParams::default() }
}

/// Thermal spectrum point (one phonon, Q = 1e4).
pub fn thermal_params() -> SystemParams {
    SystemParams { g_s: 1.0, kappa: 0.1, n_thermal: 1.0, gamma_m: 1e-4, ..SystemParams::default() }
}

/// `points` evenly spaced laser detunings over `[-1, 4]`.
pub fn grid(points: usize) -> Vec<f64> {
    let step = 5.0 / (points - 1) as f64;
    (0..points).map(|i| -1.0 + step * i as f64).collect()
}
