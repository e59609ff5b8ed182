//! Layered run configuration: built-in defaults, then a TOML file,
//! then command-line flags, each overriding the last.
//!
//! The file uses dotted sections (`geometry.r_d_nm`,
//! `phonon.alpha_ps2`, ...) and any subset of keys; everything omitted
//! keeps its default. Every command embeds the fully resolved table in
//! its output header, and `--print-config` emits it on stdout, so a
//! run can always be reproduced from its own artifact. All
//! floating-point fields carry their unit in the field name; times are
//! picoseconds and frequencies rad/ps throughout.

use clap::ValueEnum;
use mirror_sim_core::models::{PhysicalConfig, RateFrequency};
use mirror_sim_core::phonon::PhononEnvironment;
use mirror_sim_core::surface::Geometry;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Spacing rule for sweep grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Linear,
    Log,
}

/// Which generator the `dynamics` command propagates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    /// Two-level emitter with mirror-modified rate, shift and drive.
    Cavity,
    /// Two-level emitter with free-space rate and drive.
    Free,
    /// Four-level emitter-plus-image ladder.
    Image,
}

/// Initial state for the `dynamics` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StartState {
    /// The optically active excited state.
    Excited,
    /// The shared ground state.
    Ground,
}

/// Splitting fed to the phonon-rate integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RateFrequencyChoice {
    /// Polaron-shifted laser detuning.
    PolaronDetuning,
    /// Dressed-state splitting including the drive.
    DressedSplitting,
}

impl From<RateFrequencyChoice> for RateFrequency {
    fn from(choice: RateFrequencyChoice) -> Self {
        match choice {
            RateFrequencyChoice::PolaronDetuning => RateFrequency::PolaronDetuning,
            RateFrequencyChoice::DressedSplitting => RateFrequency::DressedSplitting,
        }
    }
}

/// Emitter-mirror geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    /// Emitter-mirror distance, nm.
    pub r_d_nm: f64,
    /// Free-space transition wavelength, nm.
    pub lambda0_nm: f64,
    /// Refractive index of the host medium.
    pub n_medium: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection { r_d_nm: 177.0, lambda0_nm: 950.0, n_medium: 3.5 }
    }
}

/// Optical parameters of the driven emitter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitterSection {
    /// Free-space spontaneous emission rate, 1/ps.
    pub gamma0_per_ps: f64,
    /// Laser detuning, rad/ps. Measured from the polaron-shifted line
    /// when `polaron_resonant` is set, from the bare line otherwise.
    pub detuning_rad_ps: f64,
    /// Free-space Rabi amplitude of the drive, rad/ps.
    pub drive_rad_ps: f64,
    /// Reference the detuning to the polaron-shifted transition.
    pub polaron_resonant: bool,
    /// Splitting fed to the phonon-rate integrals.
    pub rate_frequency: RateFrequencyChoice,
}

impl Default for EmitterSection {
    fn default() -> Self {
        EmitterSection {
            gamma0_per_ps: 0.001,
            detuning_rad_ps: 0.0,
            drive_rad_ps: 0.01,
            polaron_resonant: true,
            rate_frequency: RateFrequencyChoice::PolaronDetuning,
        }
    }
}

/// Superohmic phonon bath.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhononSection {
    /// Deformation coupling strength, ps^2.
    pub alpha_ps2: f64,
    /// Bath cutoff frequency, rad/ps.
    pub omega_c_rad_ps: f64,
    /// Lattice temperature, K.
    pub temperature_k: f64,
}

impl Default for PhononSection {
    fn default() -> Self {
        PhononSection { alpha_ps2: 0.03, omega_c_rad_ps: 2.2, temperature_k: 10.0 }
    }
}

/// Where the result table goes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Output file path; `-` writes to stdout.
    pub path: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { path: "-".to_string() }
    }
}

/// Distance sweep of the `rates` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesSection {
    /// First emitter-mirror distance, in units of `lambda0`.
    pub min_r_over_lambda: f64,
    /// Last emitter-mirror distance, in units of `lambda0`.
    pub max_r_over_lambda: f64,
    /// Number of sweep points.
    pub points: usize,
    pub scale: Scale,
}

impl Default for RatesSection {
    fn default() -> Self {
        RatesSection {
            min_r_over_lambda: 1e-4,
            max_r_over_lambda: 3.0,
            points: 400,
            scale: Scale::Log,
        }
    }
}

/// Time grid and initial state of the `dynamics` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSection {
    pub model: ModelChoice,
    /// Propagation horizon in units of the excited-state lifetime.
    pub t_max_gamma: f64,
    /// Number of output intervals; the table has `steps + 1` rows.
    pub steps: usize,
    pub start: StartState,
    /// Confine the image model to its driven two-level subspace.
    pub selection_rules: bool,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        DynamicsSection {
            model: ModelChoice::Cavity,
            t_max_gamma: 10.0,
            steps: 500,
            start: StartState::Excited,
            selection_rules: true,
        }
    }
}

/// Frequency window of the `spectrum` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    /// Half-width of the emitted frequency window, rad/ps; `0` picks a
    /// window covering the Mollow triplet and the phonon sideband.
    pub omega_max_rad_ps: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection { omega_max_rad_ps: 0.0 }
    }
}

/// Drive sweep of the `fraction` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FractionSection {
    /// First effective Rabi frequency, in units of the saturation scale
    /// `gamma / sqrt(2)`.
    pub min_ratio: f64,
    /// Last effective Rabi frequency, in the same units.
    pub max_ratio: f64,
    /// Number of sweep points.
    pub points: usize,
    pub scale: Scale,
}

impl Default for FractionSection {
    fn default() -> Self {
        FractionSection { min_ratio: 0.05, max_ratio: 50.0, points: 40, scale: Scale::Log }
    }
}

/// Settings of the `equivalence` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquivalenceSection {
    /// Comparison horizon in units of the excited-state lifetime.
    pub t_max_gamma: f64,
    /// Number of comparison intervals.
    pub steps: usize,
    /// Largest accepted elementwise deviation between the models.
    pub tolerance: f64,
    /// Confine the image model to its driven two-level subspace.
    pub selection_rules: bool,
}

impl Default for EquivalenceSection {
    fn default() -> Self {
        EquivalenceSection { t_max_gamma: 10.0, steps: 400, tolerance: 1e-6, selection_rules: true }
    }
}

/// The complete resolved configuration of one invocation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySection,
    pub emitter: EmitterSection,
    pub phonon: PhononSection,
    pub output: OutputSection,
    pub rates: RatesSection,
    pub dynamics: DynamicsSection,
    pub spectrum: SpectrumSection,
    pub fraction: FractionSection,
    pub equivalence: EquivalenceSection,
}

impl RunConfig {
    /// Parses a TOML file, leaving defaults for everything it omits.
    pub fn from_file(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.to_string(), source })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse config {path}: {e}")))
    }

    /// The resolved table as TOML, as printed by `--print-config` and
    /// embedded in output headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("a run configuration always serializes")
    }

    /// The physical parameter set every command hands to the models.
    pub fn physical(&self) -> PhysicalConfig {
        let env = PhononEnvironment {
            alpha_ps2: self.phonon.alpha_ps2,
            omega_c: self.phonon.omega_c_rad_ps,
            temperature_k: self.phonon.temperature_k,
        };
        let detuning = if self.emitter.polaron_resonant {
            env.polaron_shift() + self.emitter.detuning_rad_ps
        } else {
            self.emitter.detuning_rad_ps
        };
        PhysicalConfig {
            geometry: Geometry {
                r_d_nm: self.geometry.r_d_nm,
                lambda0_nm: self.geometry.lambda0_nm,
                n_medium: self.geometry.n_medium,
            },
            gamma0: self.emitter.gamma0_per_ps,
            detuning,
            drive_amplitude: self.emitter.drive_rad_ps,
            env,
            photon_thermal: false,
            rate_frequency: self.emitter.rate_frequency.into(),
        }
    }
}

/// A sweep grid with exact endpoints.
pub fn sweep_grid(min: f64, max: f64, points: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(CliError::Config(format!(
            "sweep bounds must be finite with min < max, got [{min}, {max}]"
        )));
    }
    if points < 2 {
        return Err(CliError::Config(format!("a sweep needs at least 2 points, got {points}")));
    }
    if scale == Scale::Log && min <= 0.0 {
        return Err(CliError::Config(format!(
            "a log sweep needs a positive lower bound, got {min}"
        )));
    }
    let n = points;
    let grid = (0..n)
        .map(|k| {
            if k == 0 {
                min
            } else if k == n - 1 {
                max
            } else {
                let f = k as f64 / (n - 1) as f64;
                match scale {
                    Scale::Linear => min + (max - min) * f,
                    Scale::Log => (min.ln() + (max.ln() - min.ln()) * f).exp(),
                }
            }
        })
        .collect();
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.to_toml(), text);
        assert!(text.contains("r_d_nm = 177.0"));
        assert!(text.contains("alpha_ps2 = 0.03"));
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let cfg: RunConfig = toml::from_str("[emitter]\ngamma0_per_ps = 0.002\n").unwrap();
        assert_eq!(cfg.emitter.gamma0_per_ps, 0.002);
        assert_eq!(cfg.geometry.r_d_nm, 177.0);
        assert_eq!(cfg.emitter.drive_rad_ps, 0.01);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("[emitter]\ngamma = 1.0\n").is_err());
        assert!(toml::from_str::<RunConfig>("[typo]\nx = 1\n").is_err());
    }

    #[test]
    fn polaron_resonance_shifts_the_laser() {
        let mut cfg = RunConfig::default();
        cfg.emitter.detuning_rad_ps = 0.05;
        let shifted = cfg.physical();
        assert!((shifted.delta_prime() - 0.05).abs() < 1e-15);
        cfg.emitter.polaron_resonant = false;
        let bare = cfg.physical();
        assert_eq!(bare.detuning, 0.05);
    }

    #[test]
    fn sweep_grids_hit_endpoints_exactly() {
        let lin = sweep_grid(0.5, 2.0, 4, Scale::Linear).unwrap();
        assert_eq!(lin, vec![0.5, 1.0, 1.5, 2.0]);
        let log = sweep_grid(1e-4, 3.0, 7, Scale::Log).unwrap();
        assert_eq!(log[0], 1e-4);
        assert_eq!(log[6], 3.0);
        assert!(log.windows(2).all(|w| w[0] < w[1]));
        let ratio = log[2] / log[1];
        assert!((log[3] / log[2] / ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_grid_rejects_bad_bounds() {
        assert!(sweep_grid(1.0, 1.0, 5, Scale::Linear).is_err());
        assert!(sweep_grid(2.0, 1.0, 5, Scale::Linear).is_err());
        assert!(sweep_grid(0.1, 1.0, 1, Scale::Linear).is_err());
        assert!(sweep_grid(0.0, 1.0, 5, Scale::Log).is_err());
        assert!(sweep_grid(f64::NAN, 1.0, 5, Scale::Linear).is_err());
    }
}
