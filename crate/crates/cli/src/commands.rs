//! The five commands behind the subcommand names.
//!
//! Each one resolves the physical configuration, runs the solver core,
//! and emits a single deterministic table through [`crate::output`].
//! Sweeps (`rates`, `fraction`) fan their points out over the worker
//! pool and gather results in input order, so the bytes written never
//! depend on the worker count.

use num_complex::Complex64;
use rayon::prelude::*;
use rayon::ThreadPool;

use mirror_sim_core::error::Error;
use mirror_sim_core::models::{
    build_cavity_model, build_free_model, build_image_model, equivalence_report, LindbladModel,
};
use mirror_sim_core::quantum::{evolve, CMat, DensityMatrix, SolverOptions, Trajectory};
use mirror_sim_core::spectrum::{
    coherent_fraction_at, emission_spectra_on_common_grid, SpectrumResult,
};
use mirror_sim_core::surface::{g_factor, modified_se_rate, Geometry, Orientation};

use crate::config::{sweep_grid, ModelChoice, RunConfig, StartState};
use crate::error::CliError;
use crate::output::{csv_row, fmt17, provenance_header, write_output};

/// Solver settings tight enough that trace and Hermiticity stay within
/// 1e-10 over every table this tool emits.
fn solver_options() -> SolverOptions {
    SolverOptions { atol: 1e-12, rtol: 1e-10, ..Default::default() }
}

/// Emission and shift modification factors against emitter-mirror
/// distance, for both dipole orientations.
pub fn rates(cfg: &RunConfig, pool: &ThreadPool) -> Result<i32, CliError> {
    let section = &cfg.rates;
    let grid = sweep_grid(
        section.min_r_over_lambda,
        section.max_r_over_lambda,
        section.points,
        section.scale,
    )?;
    let lambda0 = cfg.geometry.lambda0_nm;
    let n_medium = cfg.geometry.n_medium;
    Geometry { r_d_nm: grid[0] * lambda0, lambda0_nm: lambda0, n_medium }.validate()?;

    let rows: Vec<[f64; 5]> = pool.install(|| {
        grid.par_iter()
            .map(|&r| {
                let geom = Geometry { r_d_nm: r * lambda0, lambda0_nm: lambda0, n_medium };
                let x = geom.phase();
                [
                    r,
                    modified_se_rate(1.0, &geom, Orientation::Parallel),
                    g_factor(x, Orientation::Parallel),
                    modified_se_rate(1.0, &geom, Orientation::Perpendicular),
                    g_factor(x, Orientation::Perpendicular),
                ]
            })
            .collect()
    });

    let mut table = provenance_header("rates", cfg);
    table.push_str(
        "r_over_lambda,gamma_ratio_par,shift_ratio_par,gamma_ratio_perp,shift_ratio_perp\n",
    );
    for row in &rows {
        table.push_str(&csv_row(row));
    }
    write_output(&cfg.output.path, &table)?;
    Ok(0)
}

fn build_model(cfg: &RunConfig) -> Result<LindbladModel, Error> {
    let phys = cfg.physical();
    match cfg.dynamics.model {
        ModelChoice::Cavity => build_cavity_model(&phys),
        ModelChoice::Free => build_free_model(&phys),
        ModelChoice::Image => build_image_model(&phys, cfg.dynamics.selection_rules),
    }
}

fn initial_state(model: &LindbladModel, start: StartState) -> Result<DensityMatrix, Error> {
    match start {
        StartState::Ground => Ok(model.ground_state()),
        StartState::Excited => {
            let dim = model.dim();
            let excited = if dim == 2 { 1 } else { 2 };
            let mut m = CMat::zeros(dim, dim);
            m[(excited, excited)] = Complex64::ONE;
            DensityMatrix::new_at(m, 0.0)
        }
    }
}

/// Populations and the optical coherence over time for one model.
pub fn dynamics(cfg: &RunConfig) -> Result<i32, CliError> {
    let section = &cfg.dynamics;
    if !(section.t_max_gamma > 0.0) || section.steps == 0 {
        return Err(CliError::Config(format!(
            "dynamics needs t_max_gamma > 0 and steps >= 1, got ({}, {})",
            section.t_max_gamma, section.steps
        )));
    }
    let model = build_model(cfg)?;
    let gamma = model.meta.gamma_photon;
    let t_max = section.t_max_gamma / gamma;
    let times: Vec<f64> =
        (0..=section.steps).map(|k| t_max * k as f64 / section.steps as f64).collect();
    let rho0 = initial_state(&model, section.start)?;
    let traj: Trajectory = evolve(&model.liouvillian, &rho0, &times, solver_options())?;

    let dim = model.dim();
    let excited = if dim == 2 { 1 } else { 2 };
    let mut table = provenance_header("dynamics", cfg);
    table.push_str(&format!("# gamma_per_ps = {}\n", fmt17(gamma)));
    table.push_str(&format!("# t_max_ps = {}\n", fmt17(t_max)));
    table.push_str("t_ps");
    for label in &model.basis_labels {
        table.push_str(&format!(",pop_{label}"));
    }
    table.push_str(",re_coherence,im_coherence,trace\n");
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let m = state.matrix();
        let mut row = Vec::with_capacity(dim + 4);
        row.push(*t);
        for i in 0..dim {
            row.push(m[(i, i)].re);
        }
        let coherence = m[(0, excited)];
        row.push(coherence.re);
        row.push(coherence.im);
        row.push(m.trace().re);
        table.push_str(&csv_row(&row));
    }
    write_output(&cfg.output.path, &table)?;
    Ok(0)
}

fn spectrum_footer(table: &mut String, tag: &str, spec: &SpectrumResult) {
    table.push_str(&format!("# coherent_weight_{tag} = {}\n", fmt17(spec.coherent_weight)));
    table.push_str(&format!("# sideband_fraction_{tag} = {}\n", fmt17(spec.sideband_fraction)));
    for (k, peak) in spec.mollow_peaks.iter().enumerate() {
        table.push_str(&format!(
            "# mollow_{tag}_{} = {},{},{}\n",
            k + 1,
            fmt17(peak.position),
            fmt17(peak.height),
            fmt17(peak.fwhm)
        ));
    }
}

/// Incoherent emission spectra of the mirrored and the free emitter
/// under the same laser, on one frequency axis.
pub fn spectrum(cfg: &RunConfig) -> Result<i32, CliError> {
    if cfg.spectrum.omega_max_rad_ps < 0.0 {
        return Err(CliError::Config(format!(
            "omega_max_rad_ps must be >= 0, got {}",
            cfg.spectrum.omega_max_rad_ps
        )));
    }
    let phys = cfg.physical();
    let mirror = build_cavity_model(&phys)?;
    let free = build_free_model(&phys)?;
    let spectra = emission_spectra_on_common_grid(&[&mirror, &free])?;
    let (spec_mirror, spec_free) = (&spectra[0], &spectra[1]);

    let omega_max = if cfg.spectrum.omega_max_rad_ps > 0.0 {
        cfg.spectrum.omega_max_rad_ps
    } else {
        let omega_c = mirror.meta.env.omega_c;
        let drive = mirror.meta.drive.norm().max(free.meta.drive.norm());
        let gamma = mirror.meta.gamma_photon.max(free.meta.gamma_photon);
        (3.0 * omega_c).max(10.0 * drive).max(300.0 * gamma)
    };

    let mut table = provenance_header("spectrum", cfg);
    table.push_str("detuning_rad_ps,s_mirror,s_free\n");
    for (k, &omega) in spec_mirror.omega_grid.iter().enumerate() {
        if omega.abs() <= omega_max {
            table.push_str(&csv_row(&[
                omega,
                spec_mirror.s_incoherent[k],
                spec_free.s_incoherent[k],
            ]));
        }
    }
    table.push_str(&format!("# franck_condon_sq = {}\n", fmt17(mirror.meta.franck_condon.powi(2))));
    spectrum_footer(&mut table, "mirror", spec_mirror);
    spectrum_footer(&mut table, "free", spec_free);
    write_output(&cfg.output.path, &table)?;
    Ok(0)
}

/// Coherently scattered fraction against drive strength: mirrored and
/// free emitter, with and without the phonon bath.
pub fn fraction(cfg: &RunConfig, pool: &ThreadPool) -> Result<i32, CliError> {
    let section = &cfg.fraction;
    let grid = sweep_grid(section.min_ratio, section.max_ratio, section.points, section.scale)?;
    let phys = cfg.physical();
    let mut bare = phys;
    bare.env.alpha_ps2 = 0.0;

    let outcomes: Vec<Result<[f64; 5], Error>> = pool.install(|| {
        grid.par_iter()
            .map(|&u| {
                Ok([
                    u,
                    coherent_fraction_at(&phys, u, true)?,
                    coherent_fraction_at(&phys, u, false)?,
                    coherent_fraction_at(&bare, u, true)?,
                    coherent_fraction_at(&bare, u, false)?,
                ])
            })
            .collect()
    });

    let mut table = provenance_header("fraction", cfg);
    table.push_str("drive_ratio,mirror_phonons,free_phonons,mirror_no_phonons,free_no_phonons\n");
    for outcome in outcomes {
        table.push_str(&csv_row(&outcome?));
    }
    write_output(&cfg.output.path, &table)?;
    Ok(0)
}

/// Compares the mirrored two-level model against the reduced
/// emitter-plus-image model trajectory by trajectory; exits 3 when they
/// disagree beyond the tolerance.
pub fn equivalence(cfg: &RunConfig) -> Result<i32, CliError> {
    let section = &cfg.equivalence;
    if !(section.t_max_gamma > 0.0) || section.steps == 0 || !(section.tolerance > 0.0) {
        return Err(CliError::Config(format!(
            "equivalence needs t_max_gamma > 0, steps >= 1 and tolerance > 0, got ({}, {}, {})",
            section.t_max_gamma, section.steps, section.tolerance
        )));
    }
    let phys = cfg.physical();
    let gamma = build_cavity_model(&phys)?.meta.gamma_photon;
    let t_max = section.t_max_gamma / gamma;

    let mut report = provenance_header("equivalence", cfg);
    report.push_str(&format!("t_max_ps = {}\n", fmt17(t_max)));
    report.push_str(&format!("tolerance = {}\n", fmt17(section.tolerance)));
    let code = match equivalence_report(&phys, t_max, section.steps, section.selection_rules) {
        Ok(deviation) => {
            report.push_str(&format!("max_deviation = {}\n", fmt17(deviation)));
            if deviation <= section.tolerance {
                report.push_str("result = PASS\n");
                0
            } else {
                report.push_str("result = FAIL (deviation above tolerance)\n");
                3
            }
        }
        Err(Error::LeakageExceeded { leakage, bound }) => {
            report.push_str(&format!("leakage = {}\n", fmt17(leakage)));
            report.push_str(&format!("leakage_bound = {}\n", fmt17(bound)));
            report.push_str("result = FAIL (image model leaked outside the two-level subspace)\n");
            3
        }
        Err(other) => return Err(other.into()),
    };
    write_output(&cfg.output.path, &report)?;
    Ok(code)
}
