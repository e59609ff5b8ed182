//! The two master-equation pictures of a driven emitter at a mirror,
//! and the machinery proving they agree.
//!
//! The half-sided-cavity picture treats the emitter as a single
//! two-level system whose decay rate, transition shift and drive are
//! all modified by the mirror phase `x = q0 r_d`. The image-dipole
//! picture replaces the mirror by a second, fictitious emitter at the
//! mirrored position and works in the four-dimensional basis
//! `{|g>, |a>, |s>, |e>}` built from the symmetric and antisymmetric
//! single-excitation combinations of emitter and image.
//!
//! Only the symmetric state couples to the standing-wave drive (the
//! antisymmetric drive amplitude cancels exactly), and with the
//! selection rules of the zero-temperature photon bath applied, the
//! image dynamics never leaves the span of `{|g>, |s>}`. Projecting
//! onto that block reproduces the cavity model generator identically;
//! [`equivalence_report`] quantifies the agreement trajectory-wise.
//!
//! Both models are built in the rotating frame of the laser after the
//! polaron transformation: drives carry the Franck-Condon factor, the
//! detuning is reduced by the polaron shift, and the four phonon
//! scattering channels of [`crate::phonon`] enter as Lindblad and
//! cross-dephasing channels.

use num_complex::Complex64;

use crate::error::Error;
use crate::integrate::Trajectory;
use crate::operator::{ketbra, sigma_minus, sigma_plus, CMat, DensityMatrix};
use crate::phonon::{PhononEnvironment, PhononRates};
use crate::superop::{assemble_liouvillian, Channel, Superoperator};
use crate::surface::{self, Geometry, Orientation};

/// Largest tolerated out-of-block matrix element when projecting an
/// image-model trajectory onto `{|g>, |s>}`.
pub const LEAKAGE_BOUND: f64 = 1e-10;

/// Which frequency argument the phonon rates are evaluated at.
///
/// The rates depend on the splitting the phonons must bridge. In the
/// rotating frame that is the polaron-shifted detuning; under strong
/// driving a case can be made for the dressed splitting instead, so
/// both are offered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateFrequency {
    /// `w' = delta' = delta - polaron_shift` (default).
    #[default]
    PolaronDetuning,
    /// `w' = sqrt(delta'^2 + |<B> Omega|^2)`, the dressed-state splitting.
    DressedSplitting,
}

/// All experiment parameters in one validated record.
///
/// The microscopic dipole moment and field amplitude never appear:
/// they are absorbed into `gamma0` and `drive_amplitude`, the free-space
/// Rabi amplitude the same laser would produce without the mirror.
/// The emitter dipole lies parallel to the mirror surface, the
/// configuration for which the image construction applies.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConfig {
    pub geometry: Geometry,
    /// Free-space spontaneous emission rate, 1/ps.
    pub gamma0: f64,
    /// Laser detuning `omega_0 - omega_l` before the polaron shift, rad/ps.
    pub detuning: f64,
    /// Free-space Rabi amplitude, rad/ps.
    pub drive_amplitude: f64,
    pub env: PhononEnvironment,
    /// Treat the photon bath as thermally occupied. Only the
    /// zero-occupation regime is implemented; setting this is rejected
    /// at validation so configs cannot silently mean something else.
    pub photon_thermal: bool,
    pub rate_frequency: RateFrequency,
}

impl PhysicalConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.geometry.validate()?;
        self.env.validate()?;
        if !(self.gamma0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be positive, got {}",
                self.gamma0
            )));
        }
        if !self.detuning.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "detuning must be finite, got {}",
                self.detuning
            )));
        }
        if !(self.drive_amplitude >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "drive amplitude must be >= 0, got {}",
                self.drive_amplitude
            )));
        }
        if self.photon_thermal {
            return Err(Error::InvalidParameter(
                "photon_thermal is not implemented: the models assume an unoccupied photon bath"
                    .to_string(),
            ));
        }
        Ok(())
    }

    /// Polaron-shifted detuning `delta' = delta - int J/w dw`, rad/ps.
    pub fn delta_prime(&self) -> f64 {
        self.detuning - self.env.polaron_shift()
    }

    /// Per-dipole drive at the emitter position, `2 i A sin(q0 r_d)`.
    /// The laser wavenumber is taken equal to the transition wavenumber;
    /// their fractional difference is the detuning over an optical
    /// frequency, far below every other tolerance here.
    pub fn standing_rabi(&self) -> Complex64 {
        surface::standing_wave_rabi(self.drive_amplitude, &self.geometry, self.geometry.q0_per_nm())
    }

    /// Collective drive of the symmetric transition,
    /// `Omega_cav = sqrt(2) * Omega`, rad/ps.
    pub fn cavity_rabi(&self) -> Complex64 {
        std::f64::consts::SQRT_2 * self.standing_rabi()
    }

    fn rate_argument(&self, dressed_drive: Complex64) -> f64 {
        let dp = self.delta_prime();
        match self.rate_frequency {
            RateFrequency::PolaronDetuning => dp,
            RateFrequency::DressedSplitting => (dp * dp + dressed_drive.norm_sqr()).sqrt(),
        }
    }
}

/// Derived quantities fixed at model-build time, kept alongside the
/// generator for reporting and for downstream spectral analysis.
#[derive(Debug, Clone, Copy)]
pub struct ModelMeta {
    /// Photon decay rate of the driven transition, 1/ps.
    pub gamma_photon: f64,
    /// Mirror-induced transition shift `V`, rad/ps.
    pub surface_shift: f64,
    /// Polaron-shifted detuning, rad/ps.
    pub delta_prime: f64,
    /// Franck-Condon factor `<B>`.
    pub franck_condon: f64,
    /// Phonon-dressed drive of the radiating transition, rad/ps.
    pub drive: Complex64,
    /// Splitting fed to the phonon rates, rad/ps.
    pub rate_argument: f64,
    pub phonon: PhononRates,
    /// Bath the model was dressed with, kept for spectral dressing.
    pub env: PhononEnvironment,
}

/// A complete Lindblad model: Hamiltonian, channel list and the
/// assembled generator, plus the derived metadata.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub hamiltonian: CMat,
    pub channels: Vec<Channel>,
    pub basis_labels: Vec<String>,
    pub liouvillian: Superoperator,
    pub meta: ModelMeta,
}

impl LindbladModel {
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// Density matrix of the lowest basis state.
    pub fn ground_state(&self) -> DensityMatrix {
        DensityMatrix::pure(self.dim(), 0)
    }
}

/// Appends the four polaron scattering channels for lowering operator
/// `down` (its adjoint is the raising partner). Zero-rate channels are
/// omitted; the cross-dephasing pair is kept together so the generator
/// stays Hermiticity-preserving.
fn push_phonon_channels(channels: &mut Vec<Channel>, down: &CMat, rates: &PhononRates) {
    let up = down.adjoint();
    if rates.gamma_down > 0.0 {
        channels.push(Channel::lindblad(down.clone(), rates.gamma_down, "phonon-assisted decay"));
    }
    if rates.gamma_up > 0.0 {
        channels.push(Channel::lindblad(up.clone(), rates.gamma_up, "phonon-assisted excitation"));
    }
    if rates.gamma_cd_down != Complex64::ZERO {
        channels.push(Channel::cross_dephasing(
            down.clone(),
            -rates.gamma_cd_down,
            "cross-dephasing (down)",
        ));
        channels.push(Channel::cross_dephasing(up, -rates.gamma_cd_up, "cross-dephasing (up)"));
    }
}

fn drive_term(h: &mut CMat, raising: &CMat, amplitude: Complex64) {
    let half = 0.5 * amplitude;
    *h += raising * half + raising.adjoint() * half.conj();
}

/// Two-level model shared by the half-sided cavity and the free-space
/// reference; they differ only in the surface factors and the drive.
fn build_two_level(
    config: &PhysicalConfig,
    gamma_photon: f64,
    shift: f64,
    drive_bare: Complex64,
) -> Result<LindbladModel, Error> {
    let b = config.env.franck_condon()?;
    let drive = b * drive_bare;
    let delta_prime = config.delta_prime();
    let rate_argument = config.rate_argument(drive);
    let rates = config.env.phonon_rates(drive, rate_argument)?;

    let mut h = ketbra(2, 1, 1) * Complex64::new(delta_prime + shift, 0.0);
    drive_term(&mut h, &sigma_plus(), drive);

    let mut channels = vec![Channel::lindblad(sigma_minus(), gamma_photon, "photon emission")];
    push_phonon_channels(&mut channels, &sigma_minus(), &rates);
    let liouvillian = assemble_liouvillian(&h, &channels)?;

    Ok(LindbladModel {
        hamiltonian: h,
        channels,
        basis_labels: vec!["0".to_string(), "X".to_string()],
        liouvillian,
        meta: ModelMeta {
            gamma_photon,
            surface_shift: shift,
            delta_prime,
            franck_condon: b,
            drive,
            rate_argument,
            phonon: rates,
            env: config.env,
        },
    })
}

/// Half-sided-cavity model: a two-level system with decay rate
/// `gamma0 (1 + F)`, transition shift `V = G gamma0 / 2` and collective
/// drive `<B> Omega_cav` on the basis `{|0>, |X>}`.
pub fn build_cavity_model(config: &PhysicalConfig) -> Result<LindbladModel, Error> {
    config.validate()?;
    let gamma = surface::modified_se_rate(config.gamma0, &config.geometry, Orientation::Parallel);
    let shift = surface::surface_shift(config.gamma0, &config.geometry, Orientation::Parallel);
    build_two_level(config, gamma, shift, config.cavity_rabi())
}

/// Free-space reference: the same emitter with the mirror removed.
/// Surface factors vanish and the drive is the bare Rabi amplitude.
pub fn build_free_model(config: &PhysicalConfig) -> Result<LindbladModel, Error> {
    config.validate()?;
    build_two_level(config, config.gamma0, 0.0, config.drive_amplitude.into())
}

/// Basis indices of the image model, `{|g>, |a>, |s>, |e>}`.
const G: usize = 0;
const A: usize = 1;
const S: usize = 2;
const E: usize = 3;

/// Image-dipole model on `{|g>, |a>, |s>, |e>}`.
///
/// The symmetric and antisymmetric states sit at `delta' +- V12`; the
/// doubly excited state at `2 delta'` (its own surface shift cancels
/// between the two dipoles' opposite contributions and is set to zero).
/// Emission splits into a symmetric channel at `gamma0 (1 + F12)`
/// through `|e> -> |s> -> |g>` and an antisymmetric channel at
/// `gamma0 (1 - F12)` through `|e> -> |a> -> |g>`; phonon channels act
/// only on the driven symmetric ladder.
///
/// With `selection_rules` set, the `|s> <-> |e>` drive element, the
/// antisymmetric photon dissipator and the `|s> <-> |e>` parts of every
/// dissipative operator are removed, as justified for an unoccupied
/// photon bath; the dynamics then never leaves `span{|g>, |s>}`.
pub fn build_image_model(
    config: &PhysicalConfig,
    selection_rules: bool,
) -> Result<LindbladModel, Error> {
    config.validate()?;
    let x = config.geometry.phase();
    let f12 = surface::f_pair_parallel(2.0 * x);
    let v12 = 0.5 * config.gamma0 * surface::g_pair_parallel(2.0 * x);
    let gamma_s = config.gamma0 * (1.0 + f12);
    let gamma_a = config.gamma0 * (1.0 - f12);
    let delta_prime = config.delta_prime();

    let b = config.env.franck_condon()?;
    // Omega_sg = sqrt(2) Omega = Omega_cav: the same collective drive
    // as the cavity model, hence identical phonon rates by construction
    let drive = b * config.cavity_rabi();
    let rate_argument = config.rate_argument(drive);
    let rates = config.env.phonon_rates(drive, rate_argument)?;

    let mut h = ketbra(4, S, S) * Complex64::new(delta_prime + v12, 0.0)
        + ketbra(4, A, A) * Complex64::new(delta_prime - v12, 0.0)
        + ketbra(4, E, E) * Complex64::new(2.0 * delta_prime, 0.0);
    let raising_sym =
        if selection_rules { ketbra(4, S, G) } else { ketbra(4, S, G) + ketbra(4, E, S) };
    drive_term(&mut h, &raising_sym, drive);

    let lowering_sym = raising_sym.adjoint();
    let mut channels =
        vec![Channel::lindblad(lowering_sym.clone(), gamma_s, "symmetric photon emission")];
    if !selection_rules {
        let lowering_asym = ketbra(4, A, E) - ketbra(4, G, A);
        channels.push(Channel::lindblad(lowering_asym, gamma_a, "antisymmetric photon emission"));
    }
    push_phonon_channels(&mut channels, &lowering_sym, &rates);
    let liouvillian = assemble_liouvillian(&h, &channels)?;

    Ok(LindbladModel {
        hamiltonian: h,
        channels,
        basis_labels: ["g", "a", "s", "e"].map(String::from).to_vec(),
        liouvillian,
        meta: ModelMeta {
            gamma_photon: gamma_s,
            surface_shift: v12,
            delta_prime,
            franck_condon: b,
            drive,
            rate_argument,
            phonon: rates,
            env: config.env,
        },
    })
}

/// Projects an image-model trajectory onto `span{|g>, |s>}` and
/// relabels it as a two-level trajectory `{|0>, |X>}`.
///
/// Every matrix element outside the block must stay below
/// [`LEAKAGE_BOUND`]; the block is renormalized by its own trace
/// (a correction bounded by twice the verified leakage) so the result
/// passes density-matrix validation.
pub fn reduce_to_subspace(traj: &Trajectory, model: &LindbladModel) -> Result<Trajectory, Error> {
    if model.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "subspace reduction expects the four-level image model, got dim {}",
            model.dim()
        )));
    }
    let mut leakage: f64 = 0.0;
    for state in &traj.states {
        let m = state.matrix();
        for row in 0..4 {
            for col in 0..4 {
                let in_block = (row == G || row == S) && (col == G || col == S);
                if !in_block {
                    leakage = leakage.max(m[(row, col)].norm());
                }
            }
        }
    }
    if leakage > LEAKAGE_BOUND {
        return Err(Error::LeakageExceeded { leakage, bound: LEAKAGE_BOUND });
    }

    let mut states = Vec::with_capacity(traj.states.len());
    for (state, &t) in traj.states.iter().zip(&traj.times) {
        let m = state.matrix();
        let mut block = CMat::zeros(2, 2);
        block[(0, 0)] = m[(G, G)];
        block[(0, 1)] = m[(G, S)];
        block[(1, 0)] = m[(S, G)];
        block[(1, 1)] = m[(S, S)];
        let trace = block.trace().re;
        block /= Complex64::new(trace, 0.0);
        states.push(DensityMatrix::new_at(block, t)?);
    }
    Ok(Trajectory { times: traj.times.clone(), states, stats: traj.stats })
}

/// Runs both models from their ground states over `steps + 1` uniform
/// samples on `[0, t_max]` and returns the maximum elementwise
/// deviation between the cavity trajectory and the reduced image
/// trajectory. With `selection_rules` disabled the image model leaks
/// out of the two-level subspace and the reduction reports the leakage
/// instead of a deviation.
pub fn equivalence_report(
    config: &PhysicalConfig,
    t_max: f64,
    steps: usize,
    selection_rules: bool,
) -> Result<f64, Error> {
    if !(t_max > 0.0) || steps == 0 {
        return Err(Error::InvalidParameter(format!(
            "equivalence run needs t_max > 0 and steps >= 1, got ({t_max}, {steps})"
        )));
    }
    let cavity = build_cavity_model(config)?;
    let image = build_image_model(config, selection_rules)?;
    let times: Vec<f64> = (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect();
    let opts = crate::integrate::SolverOptions { atol: 1e-12, rtol: 1e-10, ..Default::default() };

    let cavity_traj =
        crate::integrate::evolve(&cavity.liouvillian, &cavity.ground_state(), &times, opts)?;
    let image_traj =
        crate::integrate::evolve(&image.liouvillian, &image.ground_state(), &times, opts)?;
    let reduced = reduce_to_subspace(&image_traj, &image)?;

    let mut deviation: f64 = 0.0;
    for (a, b) in cavity_traj.states.iter().zip(reduced.states.iter()) {
        let diff = a.matrix() - b.matrix();
        deviation = deviation.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(deviation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{evolve, SolverOptions};
    use crate::operator::hermitian_eigenvalues;
    use crate::steady::steady_state;
    use approx::assert_relative_eq;

    fn default_config() -> PhysicalConfig {
        PhysicalConfig {
            geometry: Geometry { r_d_nm: 177.0, lambda0_nm: 950.0, n_medium: 3.5 },
            gamma0: 0.001,
            detuning: 0.0,
            drive_amplitude: 0.01,
            env: PhononEnvironment { alpha_ps2: 0.03, omega_c: 2.2, temperature_k: 10.0 },
            photon_thermal: false,
            rate_frequency: RateFrequency::PolaronDetuning,
        }
    }

    fn no_phonon_config() -> PhysicalConfig {
        let mut config = default_config();
        config.env.alpha_ps2 = 0.0;
        config
    }

    fn tight() -> SolverOptions {
        SolverOptions { atol: 1e-12, rtol: 1e-10, ..Default::default() }
    }

    #[test]
    fn test_config_validation() {
        assert!(default_config().validate().is_ok());
        let mut bad = default_config();
        bad.gamma0 = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = default_config();
        bad.drive_amplitude = -0.1;
        assert!(bad.validate().is_err());
        let mut bad = default_config();
        bad.photon_thermal = true;
        assert!(bad.validate().is_err());
        let mut bad = default_config();
        bad.geometry.r_d_nm = -1.0;
        assert!(build_cavity_model(&bad).is_err());
    }

    #[test]
    fn test_cavity_steady_state_matches_bloch() {
        // without phonons and with the detuning chosen to cancel the
        // surface shift, the textbook saturation formula is exact
        let mut config = no_phonon_config();
        let shift = surface::surface_shift(config.gamma0, &config.geometry, Orientation::Parallel);
        config.detuning = -shift;
        let model = build_cavity_model(&config).unwrap();
        assert!(model.hamiltonian[(1, 1)].norm() < 1e-16);

        let omega = model.meta.drive.norm();
        let gamma = model.meta.gamma_photon;
        let expected = (omega * omega / 4.0) / (omega * omega / 2.0 + gamma * gamma / 4.0);
        let rho = steady_state(&model.liouvillian).unwrap();
        assert_relative_eq!(rho.population(1), expected, epsilon = 1e-10);
    }

    #[test]
    fn test_cavity_undriven_decay() {
        // phonon channels all carry a factor |drive|^2, so with the
        // laser off the excited state decays purely radiatively
        let mut config = default_config();
        config.drive_amplitude = 0.0;
        let model = build_cavity_model(&config).unwrap();
        assert_eq!(model.meta.phonon.gamma_down, 0.0);

        let gamma = model.meta.gamma_photon;
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 100.0).collect();
        let traj = evolve(&model.liouvillian, &DensityMatrix::pure(2, 1), &times, tight()).unwrap();
        for (k, &t) in times.iter().enumerate() {
            assert_relative_eq!(traj.states[k].population(1), (-gamma * t).exp(), epsilon = 1e-8);
        }
    }

    #[test]
    fn test_far_mirror_recovers_free_space() {
        let mut config = no_phonon_config();
        config.geometry.r_d_nm = 500.0 * config.geometry.lambda0_nm;
        let cavity = build_cavity_model(&config).unwrap();
        let free = build_free_model(&config).unwrap();
        assert_relative_eq!(cavity.meta.gamma_photon, free.meta.gamma_photon, max_relative = 1e-4);
        assert!(cavity.meta.surface_shift.abs() < 1e-4 * config.gamma0);
        assert_eq!(free.meta.surface_shift, 0.0);
        assert_eq!(free.meta.gamma_photon, config.gamma0);
    }

    #[test]
    fn test_image_hamiltonian_level_structure() {
        let mut config = no_phonon_config();
        config.drive_amplitude = 0.0;
        config.detuning = 0.05;
        let model = build_image_model(&config, false).unwrap();
        let v12 = model.meta.surface_shift;
        let eigen = hermitian_eigenvalues(&model.hamiltonian);
        let mut expected = vec![0.0, 0.05 - v12, 0.05 + v12, 0.10];
        expected.sort_by(f64::total_cmp);
        for (got, want) in eigen.iter().zip(expected.iter()) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
        // symmetric and antisymmetric levels split by exactly 2 V12
        assert_relative_eq!(
            model.hamiltonian[(S, S)].re - model.hamiltonian[(A, A)].re,
            2.0 * v12,
            max_relative = 1e-12
        );
    }

    #[test]
    fn test_antisymmetric_state_never_driven() {
        for rules in [false, true] {
            let model = build_image_model(&default_config(), rules).unwrap();
            for other in [G, S, E] {
                assert_eq!(model.hamiltonian[(A, other)], Complex64::ZERO);
                assert_eq!(model.hamiltonian[(other, A)], Complex64::ZERO);
            }
        }
    }

    #[test]
    fn test_selection_rules_confine_dynamics() {
        // strong drive, long time: |a> and |e> stay empty to solver precision
        let mut config = no_phonon_config();
        config.drive_amplitude = 0.01;
        let model = build_image_model(&config, true).unwrap();
        let t_end = 10.0 / config.gamma0;
        let times: Vec<f64> = (0..=10).map(|k| t_end * k as f64 / 10.0).collect();
        let traj = evolve(&model.liouvillian, &model.ground_state(), &times, tight()).unwrap();
        for state in &traj.states {
            assert!(state.population(A).abs() < 1e-12);
            assert!(state.population(E).abs() < 1e-12);
        }
    }

    #[test]
    fn test_without_selection_rules_excitation_leaks() {
        let mut config = no_phonon_config();
        config.drive_amplitude = 0.01;
        let model = build_image_model(&config, false).unwrap();
        let t_end = 10.0 / config.gamma0;
        let times: Vec<f64> = (0..=10).map(|k| t_end * k as f64 / 10.0).collect();
        let traj = evolve(&model.liouvillian, &model.ground_state(), &times, tight()).unwrap();
        let max_e = traj.states.iter().map(|s| s.population(E)).fold(0.0, f64::max);
        assert!(max_e > 1e-4, "doubly excited population only reached {max_e:.2e}");
    }

    #[test]
    fn test_rate_and_shift_identities_between_models() {
        let config = default_config();
        let cavity = build_cavity_model(&config).unwrap();
        let image = build_image_model(&config, true).unwrap();
        assert_relative_eq!(
            image.meta.phonon.gamma_down,
            cavity.meta.phonon.gamma_down,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            image.meta.phonon.gamma_up,
            cavity.meta.phonon.gamma_up,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            image.meta.surface_shift,
            cavity.meta.surface_shift,
            max_relative = 1e-12
        );
        assert!((image.meta.drive - cavity.meta.drive).norm() < 1e-15);
        // symmetric transition sits at delta' + V in both pictures
        assert_relative_eq!(
            image.hamiltonian[(S, S)].re,
            cavity.hamiltonian[(1, 1)].re,
            max_relative = 1e-12
        );
        // photon rates as printed: gamma_s/a = gamma0 (1 +- F12)
        let f12 = surface::f_pair_parallel(2.0 * config.geometry.phase());
        assert_relative_eq!(
            cavity.meta.gamma_photon,
            config.gamma0 * (1.0 + f12),
            max_relative = 1e-14
        );
    }

    #[test]
    fn test_dressed_splitting_option() {
        let mut config = default_config();
        config.detuning = 0.05;
        let plain = build_cavity_model(&config).unwrap();
        config.rate_frequency = RateFrequency::DressedSplitting;
        let dressed = build_cavity_model(&config).unwrap();
        let dp = config.delta_prime();
        assert_relative_eq!(plain.meta.rate_argument, dp, max_relative = 1e-14);
        let expected = (dp * dp + dressed.meta.drive.norm_sqr()).sqrt();
        assert_relative_eq!(dressed.meta.rate_argument, expected, max_relative = 1e-14);
        assert!(dressed.meta.rate_argument > plain.meta.rate_argument.abs());
    }

    #[test]
    fn test_reduce_basis_states() {
        let model = build_image_model(&no_phonon_config(), true).unwrap();
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![DensityMatrix::pure(4, G), DensityMatrix::pure(4, S)],
            stats: Default::default(),
        };
        let reduced = reduce_to_subspace(&traj, &model).unwrap();
        assert_relative_eq!(reduced.states[0].population(0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(reduced.states[1].population(1), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn test_reduce_rejects_leaky_states() {
        let model = build_image_model(&no_phonon_config(), true).unwrap();
        let traj = Trajectory {
            times: vec![0.0],
            states: vec![DensityMatrix::pure(4, A)],
            stats: Default::default(),
        };
        match reduce_to_subspace(&traj, &model) {
            Err(Error::LeakageExceeded { leakage, .. }) => assert!(leakage > 0.9),
            other => panic!("expected leakage error, got {other:?}"),
        }
    }

    #[test]
    fn test_image_steady_state_is_degenerate_under_selection_rules() {
        // |a> and |e> are exactly decoupled, so the kernel is not unique;
        // this is why the equivalence check runs trajectories instead
        let model = build_image_model(&default_config(), true).unwrap();
        match steady_state(&model.liouvillian) {
            Err(Error::DegenerateKernel { dim }) => assert!(dim >= 2),
            other => panic!("expected degenerate kernel, got {other:?}"),
        }
    }

    #[test]
    fn test_equivalence_without_phonons() {
        let config = no_phonon_config();
        let deviation = equivalence_report(&config, 10.0 / config.gamma0, 40, true).unwrap();
        assert!(deviation <= 1e-9, "deviation {deviation:.3e}");
    }

    #[test]
    fn test_equivalence_with_phonons() {
        let config = default_config();
        let deviation = equivalence_report(&config, 10.0 / config.gamma0, 40, true).unwrap();
        assert!(deviation <= 1e-8, "deviation {deviation:.3e}");
    }

    #[test]
    fn test_equivalence_undriven() {
        let mut config = default_config();
        config.drive_amplitude = 0.0;
        let deviation = equivalence_report(&config, 10.0 / config.gamma0, 40, true).unwrap();
        assert!(deviation <= 1e-10, "deviation {deviation:.3e}");
    }
}
