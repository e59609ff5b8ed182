//! Interactive browser demo of the mirrored-emitter models.
//!
//! Three curve generators back a single static page: the
//! distance dependence of emission rate and transition shift, the
//! driven relaxation of the excited-state population, and the coherent
//! emission fraction against drive strength. Each returns a flat
//! `Vec<f64>` with a fixed stride so the page can slice it into plot
//! series without any glue types crossing the wasm boundary.
//!
//! The functions are ordinary Rust and are unit-tested on the host;
//! `wasm-bindgen` merely exports them unchanged. Parameters arrive
//! straight from sliders, so every entry point validates its inputs
//! and reports problems as strings rather than panicking inside the
//! wasm module.

use wasm_bindgen::prelude::wasm_bindgen;

use mirror_sim_core::models::{build_cavity_model, PhysicalConfig, RateFrequency};
use mirror_sim_core::phonon::PhononEnvironment;
use mirror_sim_core::quantum::{evolve, SolverOptions};
use mirror_sim_core::spectrum::coherent_fraction_sweep;
use mirror_sim_core::surface::{f_factor, g_factor, modified_se_rate, Geometry, Orientation};

/// Fixed emitter used by the time and drive curves: a quantum-dot-like
/// transition at 950 nm in a GaAs-like host, `gamma0 = 0.001 / ps`.
fn demo_config(
    r_d_nm: f64,
    drive_rad_ps: f64,
    alpha_ps2: f64,
    temperature_k: f64,
) -> PhysicalConfig {
    let env = PhononEnvironment { alpha_ps2, omega_c: 2.2, temperature_k };
    PhysicalConfig {
        geometry: Geometry { r_d_nm, lambda0_nm: 950.0, n_medium: 3.5 },
        gamma0: 0.001,
        detuning: env.polaron_shift(),
        drive_amplitude: drive_rad_ps,
        env,
        photon_thermal: false,
        rate_frequency: RateFrequency::PolaronDetuning,
    }
}

fn checked_points(points: usize) -> Result<usize, String> {
    if (2..=100_000).contains(&points) {
        Ok(points)
    } else {
        Err(format!("points must be between 2 and 100000, got {points}"))
    }
}

/// Emission rate and transition shift against scaled distance
/// `x = r_d / lambda0`, for both dipole orientations.
///
/// Flat rows of stride 5: `x`, `gamma_par/gamma0`, `shift_par/gamma0`,
/// `gamma_perp/gamma0`, `shift_perp/gamma0`, on a linear grid
/// `x in [0.005, 2]`. `n_medium` sets the oscillation density.
#[wasm_bindgen]
pub fn rate_shift_curve(n_medium: f64, points: usize) -> Result<Vec<f64>, String> {
    let points = checked_points(points)?;
    if !(1.0..=6.0).contains(&n_medium) {
        return Err(format!("n_medium must be between 1 and 6, got {n_medium}"));
    }
    let (lo, hi) = (0.005, 2.0);
    let mut rows = Vec::with_capacity(5 * points);
    for k in 0..points {
        let x = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let phase = 2.0 * std::f64::consts::PI * n_medium * x;
        rows.extend_from_slice(&[
            x,
            1.0 + f_factor(phase, Orientation::Parallel),
            g_factor(phase, Orientation::Parallel) / 2.0,
            1.0 + f_factor(phase, Orientation::Perpendicular),
            g_factor(phase, Orientation::Perpendicular) / 2.0,
        ]);
    }
    Ok(rows)
}

/// Excited-state population of the mirrored emitter, driven on the
/// polaron-shifted resonance and starting from the ground state.
///
/// Flat rows of stride 2: time in units of the mirrored lifetime
/// `1/gamma_cav`, then the population; the horizon is ten lifetimes.
/// Pick `drive_rad_ps` of order 0.01 to watch damped Rabi cycles.
#[wasm_bindgen]
pub fn excited_population_curve(
    r_d_nm: f64,
    drive_rad_ps: f64,
    alpha_ps2: f64,
    temperature_k: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let points = checked_points(points)?;
    let config = demo_config(r_d_nm, drive_rad_ps, alpha_ps2, temperature_k);
    config.validate().map_err(|e| e.to_string())?;
    let gamma_cav = modified_se_rate(config.gamma0, &config.geometry, Orientation::Parallel);
    if gamma_cav < 1e-7 {
        return Err("the emitter sits so close to the mirror that it barely decays".to_string());
    }

    let model = build_cavity_model(&config).map_err(|e| e.to_string())?;
    let times: Vec<f64> =
        (0..points).map(|k| 10.0 / gamma_cav * k as f64 / (points - 1) as f64).collect();
    let traj = evolve(&model.liouvillian, &model.ground_state(), &times, SolverOptions::default())
        .map_err(|e| e.to_string())?;

    let mut rows = Vec::with_capacity(2 * points);
    for (t, state) in traj.times.iter().zip(traj.states.iter()) {
        rows.extend_from_slice(&[t * gamma_cav, state.population(1)]);
    }
    Ok(rows)
}

/// Coherently scattered fraction against the drive ratio
/// `u = Omega_eff / Omega_s`, for the mirrored and the free emitter.
///
/// Flat rows of stride 3: `u` on a logarithmic grid `[0.05, 50]`, the
/// mirrored fraction, the free-space fraction. The low-drive plateau
/// sits at the squared Franck-Condon factor of the chosen bath.
#[wasm_bindgen]
pub fn coherent_fraction_curve(
    alpha_ps2: f64,
    temperature_k: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let points = checked_points(points.min(200))?;
    let config = demo_config(177.0, 0.01, alpha_ps2, temperature_k);
    config.validate().map_err(|e| e.to_string())?;

    let (lo, hi) = (0.05f64, 50.0f64);
    let ratios: Vec<f64> =
        (0..points).map(|k| lo * (hi / lo).powf(k as f64 / (points - 1) as f64)).collect();
    let mirrored = coherent_fraction_sweep(&config, &ratios, true).map_err(|e| e.to_string())?;
    let free = coherent_fraction_sweep(&config, &ratios, false).map_err(|e| e.to_string())?;

    let mut rows = Vec::with_capacity(3 * points);
    for (m, f) in mirrored.iter().zip(free.iter()) {
        rows.extend_from_slice(&[m.0, m.1, f.1]);
    }
    Ok(rows)
}
