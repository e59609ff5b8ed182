//! Master-equation models of a driven quantum-dot exciton in front of a
//! perfect mirror, with acoustic-phonon dressing treated in the polaron
//! frame.
//!
//! The crate provides two equivalent descriptions of the same physical
//! system and the machinery to compare them quantitatively:
//!
//! * a **half-sided-cavity model**: a two-level emitter whose spontaneous
//!   emission rate, Lamb-type frequency shift and drive amplitude are
//!   modified by the mirror ([`surface`], [`models::build_cavity_model`]);
//! * an **image-dipole model**: the emitter plus its mirror image as a
//!   pair of two-level dipoles with correlated photon and phonon
//!   environments, expressed in the symmetric/antisymmetric basis
//!   ([`models::build_image_model`]).
//!
//! Both are Lindblad master equations assembled by [`quantum`], driven by
//! phonon scattering rates from [`phonon`]. [`spectrum`] computes
//! resonance-fluorescence spectra (Mollow triplet, phonon sideband,
//! coherent fraction) through the quantum regression theorem.
//!
//! # Units
//!
//! `hbar = 1` throughout. Frequencies and rates are in rad/ps, times in
//! ps, temperatures in K, lengths in nm where noted.

pub mod correlation;
pub mod error;
pub mod integrate;
pub mod models;
pub mod operator;
pub mod phonon;
pub mod quad;
pub mod spectrum;
pub mod steady;
pub mod superop;
pub mod surface;

pub use error::Error;

/// `k_B / hbar` in rad/(ps K).
///
/// From the exact SI values `k_B = 1.380649e-23 J/K` and
/// `h = 6.62607015e-34 J s`: `k_B/hbar = 2 pi k_B / h
/// = 1.30920339126989e11 rad/(s K)`, converted to ps.
pub const KB_OVER_HBAR_RAD_PS_K: f64 = 0.130920339126989;

/// Inverse temperature `hbar/(k_B T)` in ps. `T` must be positive.
pub fn beta_ps(temperature_k: f64) -> f64 {
    1.0 / (KB_OVER_HBAR_RAD_PS_K * temperature_k)
}

/// Namespace with the quantum-operator layer re-exported in one place.
pub mod quantum {
    pub use crate::correlation::two_time_correlation;
    pub use crate::integrate::{
        evolve, evolve_expm, propagate_raw, SolverOptions, SolverStats, Trajectory,
    };
    pub use crate::operator::{
        anti_commutator, commutator, hermitize, identity, ketbra, sigma_minus, sigma_plus, CMat,
        CVec, DensityMatrix,
    };
    pub use crate::steady::steady_state;
    pub use crate::superop::{assemble_liouvillian, Channel, ChannelKind, Superoperator};
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_at_10_k() {
        // 1/(0.13092... * 10) ps
        let b = beta_ps(10.0);
        assert!((b - 0.763825).abs() < 1e-5);
    }
}
