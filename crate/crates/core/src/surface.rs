//! Mirror-induced modification of spontaneous emission, frequency shift
//! and drive amplitude.
//!
//! A dipole a distance `r_d` in front of a perfect mirror interferes
//! with its own reflected field. The modified decay rate and the
//! coherent (Lamb-type) shift are rational-trigonometric functions of
//! the single phase `x = q0 r_d`, where `q0 = 2 pi n / lambda0` is the
//! transition wavenumber in the host medium. The same functions, taken
//! at the image-pair separation phase `y = 2 x`, are the cross-emission
//! and exchange factors of the dipole + image-dipole pair, which is what
//! makes the half-sided-cavity and image-dipole pictures agree.
//!
//! Dipoles parallel to the mirror surface see their image inverted (rate
//! suppressed to zero at contact); perpendicular dipoles see an upright
//! image (rate doubled at contact).

use num_complex::Complex64;

use crate::error::Error;

/// Dipole orientation relative to the mirror surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Parallel,
    Perpendicular,
}

/// Emitter-mirror geometry. Lengths in nm.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    /// Emitter-mirror distance.
    pub r_d_nm: f64,
    /// Free-space transition wavelength.
    pub lambda0_nm: f64,
    /// Refractive index of the host medium.
    pub n_medium: f64,
}

impl Geometry {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.r_d_nm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "r_d must be positive, got {}",
                self.r_d_nm
            )));
        }
        if !(self.lambda0_nm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda0 must be positive, got {}",
                self.lambda0_nm
            )));
        }
        if !(self.n_medium >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "n_medium must be >= 1, got {}",
                self.n_medium
            )));
        }
        Ok(())
    }

    /// Transition wavenumber in the medium, rad/nm.
    pub fn q0_per_nm(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.n_medium / self.lambda0_nm
    }

    /// Mirror phase `x = q0 r_d`.
    pub fn phase(&self) -> f64 {
        self.q0_per_nm() * self.r_d_nm
    }
}

/// Below this pair phase the trigonometric forms lose ~6 digits to
/// cancellation and the Taylor series takes over (`x < 1e-3`, `y < 2e-3`).
const SERIES_THRESHOLD_Y: f64 = 2e-3;

/// Cross-emission factor of two parallel dipoles at separation phase `y`.
///
/// `(3/2) (-sin y / y - cos y / y^2 + sin y / y^3)`, continued to
/// `-1 + y^2/5 - 3 y^4/280 + y^6/3780` near zero.
pub fn f_pair_parallel(y: f64) -> f64 {
    if y < SERIES_THRESHOLD_Y {
        let y2 = y * y;
        return -1.0 + y2 / 5.0 - 3.0 * y2 * y2 / 280.0 + y2 * y2 * y2 / 3780.0;
    }
    let (s, c) = y.sin_cos();
    1.5 * (-s / y - c / (y * y) + s / (y * y * y))
}

/// Exchange (shift) factor of two parallel dipoles at separation phase
/// `y`; diverges like `-(3/2)/y^3` at contact.
pub fn g_pair_parallel(y: f64) -> f64 {
    let (s, c) = y.sin_cos();
    1.5 * (-s / (y * y) - c / (y * y * y) + c / y)
}

/// Cross-emission factor for perpendicular dipoles:
/// `3 (-cos y / y^2 + sin y / y^3)`, continued to
/// `1 - y^2/10 + y^4/280 - y^6/15120` near zero.
pub fn f_pair_perpendicular(y: f64) -> f64 {
    if y < SERIES_THRESHOLD_Y {
        let y2 = y * y;
        return 1.0 - y2 / 10.0 + y2 * y2 / 280.0 - y2 * y2 * y2 / 15120.0;
    }
    let (s, c) = y.sin_cos();
    3.0 * (-c / (y * y) + s / (y * y * y))
}

/// Exchange factor for perpendicular dipoles:
/// `-3 (sin y / y^2 + cos y / y^3)`; diverges like `-3/y^3` at contact.
pub fn g_pair_perpendicular(y: f64) -> f64 {
    let (s, c) = y.sin_cos();
    -3.0 * (s / (y * y) + c / (y * y * y))
}

/// Relative rate modification `(gamma - gamma0)/gamma0` at mirror phase
/// `x = q0 r_d`. Ranges over `[-1, 1]`: parallel emission is fully
/// suppressed at contact, perpendicular emission doubled.
pub fn f_factor(x: f64, orientation: Orientation) -> f64 {
    match orientation {
        Orientation::Parallel => f_pair_parallel(2.0 * x),
        Orientation::Perpendicular => f_pair_perpendicular(2.0 * x),
    }
}

/// Shift factor `2 V / gamma0` at mirror phase `x = q0 r_d`.
pub fn g_factor(x: f64, orientation: Orientation) -> f64 {
    match orientation {
        Orientation::Parallel => g_pair_parallel(2.0 * x),
        Orientation::Perpendicular => g_pair_perpendicular(2.0 * x),
    }
}

/// Mirror-modified spontaneous emission rate `gamma0 (1 + f)`, 1/ps.
pub fn modified_se_rate(gamma0: f64, geom: &Geometry, orientation: Orientation) -> f64 {
    gamma0 * (1.0 + f_factor(geom.phase(), orientation))
}

/// Mirror-induced transition shift `V = g gamma0 / 2`, rad/ps.
pub fn surface_shift(gamma0: f64, geom: &Geometry, orientation: Orientation) -> f64 {
    0.5 * gamma0 * g_factor(geom.phase(), orientation)
}

/// Effective drive of the emitter in front of the mirror: the incident
/// beam plus its pi-shifted reflection form a standing wave with a node
/// on the surface, so `Omega(r_d) = 2 i A sin(q_l r_d)` where `A` is the
/// free-space Rabi amplitude `2 d E0` and `q_l` the laser wavenumber in
/// the medium (rad/nm).
pub fn standing_wave_rabi(drive_amplitude: f64, geom: &Geometry, q_l_per_nm: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * drive_amplitude * (q_l_per_nm * geom.r_d_nm).sin())
}
