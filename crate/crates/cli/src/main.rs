//! Command-line front end for the mirror-emitter models.
//!
//! Five commands cover the standard numerical experiments on a driven
//! quantum-dot exciton in front of a perfect mirror:
//!
//! * `rates` sweeps the emitter-mirror distance and tabulates the
//!   modified emission rate and transition shift for both dipole
//!   orientations.
//! * `dynamics` propagates one model and tabulates populations and the
//!   optical coherence over time.
//! * `spectrum` emits the incoherent resonance-fluorescence spectra of
//!   the mirrored and the free emitter side by side.
//! * `fraction` sweeps the drive strength and tabulates the coherently
//!   scattered fraction, with and without the phonon bath.
//! * `equivalence` checks the mirrored two-level model against the
//!   reduced emitter-plus-image model and fails loudly if they differ.
//!
//! Settings resolve in three layers: built-in defaults, an optional
//! `--config` TOML file, then individual flags. `--print-config` shows
//! the result of that resolution without running anything. Exit codes:
//! 0 on success, 1 for configuration mistakes, 2 for numerical
//! failures, 3 when an equivalence check completes and fails.

mod commands;
mod config;
mod error;
mod output;

use clap::{Args, Parser, Subcommand};

use config::{ModelChoice, RateFrequencyChoice, RunConfig, Scale, StartState};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "mirror-sim",
    version,
    about = "Driven quantum-dot exciton in front of a mirror: rates, dynamics, spectra, coherent fraction and model equivalence"
)]
struct Cli {
    /// TOML settings file applied over the built-in defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,

    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,

    /// Worker threads for sweeps; 0 means one per CPU. Without the
    /// flag, MIRROR_SIM_THREADS is consulted before defaulting to 0.
    #[arg(long, global = true, value_name = "N", allow_negative_numbers = true)]
    threads: Option<usize>,

    /// Output path; `-` writes to stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<String>,

    #[command(flatten)]
    physics: PhysicsFlags,

    #[command(flatten)]
    sweep: SweepFlags,

    #[command(subcommand)]
    command: Option<Command>,
}

/// Overrides for the physical parameter sections.
#[derive(Args)]
struct PhysicsFlags {
    /// Emitter-mirror distance [nm].
    #[arg(long, global = true, value_name = "NM", allow_negative_numbers = true)]
    r_d_nm: Option<f64>,

    /// Free-space transition wavelength [nm].
    #[arg(long, global = true, value_name = "NM", allow_negative_numbers = true)]
    lambda0_nm: Option<f64>,

    /// Refractive index of the host medium.
    #[arg(long, global = true, value_name = "N", allow_negative_numbers = true)]
    n_medium: Option<f64>,

    /// Free-space spontaneous emission rate [1/ps].
    #[arg(long, global = true, value_name = "RATE", allow_negative_numbers = true)]
    gamma0: Option<f64>,

    /// Laser detuning [rad/ps]; see emitter.polaron_resonant for the
    /// reference line.
    #[arg(long, global = true, value_name = "RAD_PS", allow_negative_numbers = true)]
    detuning: Option<f64>,

    /// Free-space Rabi amplitude of the drive [rad/ps].
    #[arg(long, global = true, value_name = "RAD_PS", allow_negative_numbers = true)]
    drive: Option<f64>,

    /// Reference the detuning to the polaron-shifted line.
    #[arg(long, global = true, value_name = "BOOL")]
    polaron_resonant: Option<bool>,

    /// Splitting fed to the phonon-rate integrals.
    #[arg(long, global = true, value_name = "CHOICE")]
    rate_frequency: Option<RateFrequencyChoice>,

    /// Phonon coupling strength [ps^2].
    #[arg(long, global = true, value_name = "PS2", allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Phonon bath cutoff [rad/ps].
    #[arg(long, global = true, value_name = "RAD_PS", allow_negative_numbers = true)]
    omega_c: Option<f64>,

    /// Lattice temperature [K].
    #[arg(long, global = true, value_name = "K", allow_negative_numbers = true)]
    temperature: Option<f64>,
}

impl PhysicsFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.r_d_nm {
            cfg.geometry.r_d_nm = v;
        }
        if let Some(v) = self.lambda0_nm {
            cfg.geometry.lambda0_nm = v;
        }
        if let Some(v) = self.n_medium {
            cfg.geometry.n_medium = v;
        }
        if let Some(v) = self.gamma0 {
            cfg.emitter.gamma0_per_ps = v;
        }
        if let Some(v) = self.detuning {
            cfg.emitter.detuning_rad_ps = v;
        }
        if let Some(v) = self.drive {
            cfg.emitter.drive_rad_ps = v;
        }
        if let Some(v) = self.polaron_resonant {
            cfg.emitter.polaron_resonant = v;
        }
        if let Some(v) = self.rate_frequency {
            cfg.emitter.rate_frequency = v;
        }
        if let Some(v) = self.alpha {
            cfg.phonon.alpha_ps2 = v;
        }
        if let Some(v) = self.omega_c {
            cfg.phonon.omega_c_rad_ps = v;
        }
        if let Some(v) = self.temperature {
            cfg.phonon.temperature_k = v;
        }
    }
}

/// Overrides for the active command's sweep grid.
#[derive(Args)]
struct SweepFlags {
    /// Lower sweep bound (rates: r_d/lambda0, fraction: drive ratio).
    #[arg(long, global = true, value_name = "MIN", allow_negative_numbers = true)]
    sweep_min: Option<f64>,

    /// Upper sweep bound.
    #[arg(long, global = true, value_name = "MAX", allow_negative_numbers = true)]
    sweep_max: Option<f64>,

    /// Number of sweep points.
    #[arg(long, global = true, value_name = "N", allow_negative_numbers = true)]
    sweep_points: Option<usize>,

    /// Sweep spacing rule.
    #[arg(long, global = true, value_name = "SCALE")]
    sweep_scale: Option<Scale>,
}

impl SweepFlags {
    fn any(&self) -> bool {
        self.sweep_min.is_some()
            || self.sweep_max.is_some()
            || self.sweep_points.is_some()
            || self.sweep_scale.is_some()
    }

    fn apply(&self, cfg: &mut RunConfig, command: Option<&Command>) -> Result<(), CliError> {
        if !self.any() {
            return Ok(());
        }
        let (min, max, points, scale) = match command {
            Some(Command::Rates) => (
                &mut cfg.rates.min_r_over_lambda,
                &mut cfg.rates.max_r_over_lambda,
                &mut cfg.rates.points,
                &mut cfg.rates.scale,
            ),
            Some(Command::Fraction) => (
                &mut cfg.fraction.min_ratio,
                &mut cfg.fraction.max_ratio,
                &mut cfg.fraction.points,
                &mut cfg.fraction.scale,
            ),
            _ => {
                return Err(CliError::Config(
                    "--sweep-* flags apply to the rates and fraction commands".to_string(),
                ))
            }
        };
        if let Some(v) = self.sweep_min {
            *min = v;
        }
        if let Some(v) = self.sweep_max {
            *max = v;
        }
        if let Some(v) = self.sweep_points {
            *points = v;
        }
        if let Some(v) = self.sweep_scale {
            *scale = v;
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emission-rate and shift factors vs emitter-mirror distance.
    Rates,
    /// Populations and coherences of one model over time.
    Dynamics(DynamicsFlags),
    /// Incoherent emission spectra, mirrored vs free emitter.
    Spectrum(SpectrumFlags),
    /// Coherent emission fraction vs drive strength, four curves.
    Fraction,
    /// Trajectory comparison of the two model representations.
    Equivalence(EquivalenceFlags),
}

#[derive(Args)]
struct DynamicsFlags {
    /// Generator to propagate.
    #[arg(long, value_name = "MODEL")]
    model: Option<ModelChoice>,

    /// Horizon in units of the excited-state lifetime.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    t_max_gamma: Option<f64>,

    /// Number of output intervals.
    #[arg(long, value_name = "N")]
    steps: Option<usize>,

    /// Initial state.
    #[arg(long, value_name = "STATE")]
    start: Option<StartState>,

    /// Confine the image model to its driven two-level subspace.
    #[arg(long, value_name = "BOOL")]
    selection_rules: Option<bool>,
}

#[derive(Args)]
struct SpectrumFlags {
    /// Half-width of the emitted frequency window [rad/ps]; 0 = auto.
    #[arg(long, value_name = "RAD_PS", allow_negative_numbers = true)]
    omega_max: Option<f64>,
}

#[derive(Args)]
struct EquivalenceFlags {
    /// Horizon in units of the excited-state lifetime.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    t_max_gamma: Option<f64>,

    /// Number of comparison intervals.
    #[arg(long, value_name = "N")]
    steps: Option<usize>,

    /// Largest accepted elementwise deviation.
    #[arg(long, value_name = "DEV", allow_negative_numbers = true)]
    tolerance: Option<f64>,

    /// Confine the image model to its driven two-level subspace.
    #[arg(long, value_name = "BOOL")]
    selection_rules: Option<bool>,
}

fn apply_command_flags(cfg: &mut RunConfig, command: &Command) {
    match command {
        Command::Rates | Command::Fraction => {}
        Command::Dynamics(f) => {
            if let Some(v) = f.model {
                cfg.dynamics.model = v;
            }
            if let Some(v) = f.t_max_gamma {
                cfg.dynamics.t_max_gamma = v;
            }
            if let Some(v) = f.steps {
                cfg.dynamics.steps = v;
            }
            if let Some(v) = f.start {
                cfg.dynamics.start = v;
            }
            if let Some(v) = f.selection_rules {
                cfg.dynamics.selection_rules = v;
            }
        }
        Command::Spectrum(f) => {
            if let Some(v) = f.omega_max {
                cfg.spectrum.omega_max_rad_ps = v;
            }
        }
        Command::Equivalence(f) => {
            if let Some(v) = f.t_max_gamma {
                cfg.equivalence.t_max_gamma = v;
            }
            if let Some(v) = f.steps {
                cfg.equivalence.steps = v;
            }
            if let Some(v) = f.tolerance {
                cfg.equivalence.tolerance = v;
            }
            if let Some(v) = f.selection_rules {
                cfg.equivalence.selection_rules = v;
            }
        }
    }
}

/// Worker pool for sweep commands. The flag wins over the
/// `MIRROR_SIM_THREADS` environment variable; 0 or nothing means one
/// worker per CPU.
fn thread_pool(flag: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("MIRROR_SIM_THREADS") {
            Ok(s) if s.trim().is_empty() => 0,
            Ok(s) => s.trim().parse::<usize>().map_err(|_| {
                CliError::Config(format!("MIRROR_SIM_THREADS must be a thread count, got {s:?}"))
            })?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cli.physics.apply(&mut cfg);
    if let Some(path) = &cli.output {
        cfg.output.path = path.clone();
    }
    if let Some(command) = &cli.command {
        apply_command_flags(&mut cfg, command);
    }
    cli.sweep.apply(&mut cfg, cli.command.as_ref())?;

    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(0);
    }
    let Some(command) = cli.command else {
        return Err(CliError::Config(
            "a command is required: rates | dynamics | spectrum | fraction | equivalence (see --help)"
                .to_string(),
        ));
    };
    cfg.physical().validate()?;
    match command {
        Command::Rates => commands::rates(&cfg, &thread_pool(cli.threads)?),
        Command::Dynamics(_) => commands::dynamics(&cfg),
        Command::Spectrum(_) => commands::spectrum(&cfg),
        Command::Fraction => commands::fraction(&cfg, &thread_pool(cli.threads)?),
        Command::Equivalence(_) => commands::equivalence(&cfg),
    }
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { 0 } else { 1 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mirror-sim: {e}");
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(run());
}
